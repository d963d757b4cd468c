#pragma once

#include "bilevel_lm/jacobian.hpp"
#include "bilevel_lm/problem.hpp"
#include "bilevel_lm/residual.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bilevel_lm {

/// Penalty parameter sequence: either a fixed value or the geometric
/// ramp lambda_k = base * ratio^k.
struct PenaltySchedule {
    enum class Kind { fixed, geometric };
    Kind kind = Kind::geometric;
    double value = 1.0;   // fixed variant
    double base = 0.5;    // geometric variant
    double ratio = 1.05;

    static PenaltySchedule fixed(double lambda) {
        PenaltySchedule s;
        s.kind = Kind::fixed;
        s.value = lambda;
        return s;
    }
    static PenaltySchedule geometric(double base = 0.5, double ratio = 1.05) {
        PenaltySchedule s;
        s.kind = Kind::geometric;
        s.base = base;
        s.ratio = ratio;
        return s;
    }
    double at(int k) const {
        return kind == Kind::fixed ? value : base * std::pow(ratio, k);
    }
};

/// Smoothing parameter sequence: fixed, or mu_k = base / ratio^k clamped
/// below at floor. The floor keeps late iterations away from exact FB kinks.
struct SmoothingSchedule {
    enum class Kind { fixed, decreasing };
    Kind kind = Kind::decreasing;
    double value = 1e-11;
    double base = 0.001;
    double ratio = 1.5;
    double floor = 1e-12;

    static SmoothingSchedule fixed(double mu) {
        SmoothingSchedule s;
        s.kind = Kind::fixed;
        s.value = mu;
        return s;
    }
    static SmoothingSchedule decreasing(double base = 0.001, double ratio = 1.5,
                                        double floor = 1e-12) {
        SmoothingSchedule s;
        s.kind = Kind::decreasing;
        s.base = base;
        s.ratio = ratio;
        s.floor = floor;
        return s;
    }
    double at(int k) const {
        if (kind == Kind::fixed) return value;
        return std::max(base / std::pow(ratio, k), floor);
    }
};

struct SolverConfig {
    double epsilon = 1e-5;
    int max_iters = 1000;
    double sigma = 1e-2;    // Armijo sufficient-decrease factor, in (0,1)
    double rho = 0.5;       // backtracking contraction, in (0,1)
    double gamma0 = 1.0;    // initial stepsize, in (0,1]
    double eta = 1.0;       // LM parameter exponent, in [1,2]
    double alpha_boost = 1e4;
    PenaltySchedule lambda_schedule = PenaltySchedule::geometric();
    SmoothingSchedule mu_schedule = SmoothingSchedule::decreasing();
    /// Per-criterion enable flags for the six stopping tests; the max-iteration
    /// cap always applies. Studies run with all six disabled.
    std::array<bool, 6> criteria_enabled = {true, true, true, true, true, true};

    static SolverConfig study_override() {
        SolverConfig c;
        c.criteria_enabled = {false, false, false, false, false, false};
        return c;
    }
};

enum class StopReason {
    criterion1 = 1,  // ||residual_smoothed|| < epsilon
    criterion2,      // |Error_{k-1} - Error_k| < 1e-9
    criterion3,      // |Error_{k-1} - Error_k| < 1e-4 and iter > 200
    criterion4,      // Error increased, Error_k < 10 and iter > 175
    criterion5,      // Error_k < 1e-2 and iter > 500
    criterion6,      // Error_k > 1e2 and iter > 200
    max_iterations,
    line_search_failure,
    non_finite,
};

std::string to_string(StopReason reason);

struct IterationRecord {
    int k = 0;
    double lambda_k = 0.0;
    double mu_k = 0.0;
    double alpha_k = 0.0;
    double residual_norm = 0.0;            // ||residual_smoothed(z^k)||
    double unsmoothed_residual_norm = 0.0; // Error_k = ||residual(z^k)||
    double gamma_k = 0.0;
    int backtrack_count = 0;
    Vec z_snapshot;
};

struct RunResult {
    Iterate final_z{0, 0, 0, 0};
    std::vector<IterationRecord> trace;
    StopReason stop_reason = StopReason::max_iterations;
    double wall_time = 0.0;
};

/// Default start x0 = 1_n, y0 = 1_m unless the problem ships a start or the
/// caller overrides. Multipliers: u0 = max{0.01, -g(x0,y0)} componentwise,
/// v0 = max{0.01, -G(x0,y0)}, w0 = u0.
Iterate initialize_iterate(const BilevelProblem& problem,
                           const std::optional<StartPoint>& start_override = std::nullopt);

/// Solves (J^T J + alpha I) d = -J^T r by dense LU with partial pivoting.
/// alpha > 0 keeps the normal matrix symmetric positive definite. Throws
/// std::runtime_error when the solve is contaminated by non-finite values.
Vec lm_direction(const Mat& jacobian, const Vec& residual, double alpha);

/// alpha_k = residual_norm^eta, or alpha_boost * residual_norm when the
/// previous iteration increased the residual norm (steepest-descent fallback).
double lm_parameter(double residual_norm, double eta, bool previous_increase,
                    double alpha_boost = 1e4);

struct LineSearchResult {
    double gamma = 0.0;
    int backtracks = 0;
    bool success = false;
};

/// Backtracks gamma over {gamma0, rho*gamma0, ...} until
///   ||r(z + gamma d)||^2 < ||r(z)||^2 + sigma * gamma * (2 J^T r)^T d,
/// where r is the smoothed residual at the given state. Gives up after 60
/// halvings.
LineSearchResult armijo_backtrack(const BilevelProblem& problem, const Iterate& z, const Vec& d,
                                  const PenaltySmoothingState& state, const SolverConfig& config);

/// First satisfied stopping criterion (lowest index wins), or nullopt.
/// Criterion 1 fires when either the smoothed norm or the unsmoothed Error of
/// the latest record drops below epsilon; criteria 2-6 use the unsmoothed
/// Error.
std::optional<StopReason> check_stop(const std::vector<IterationRecord>& trace,
                                     const SolverConfig& config);

RunResult solve(const BilevelProblem& problem, const SolverConfig& config,
                const std::optional<StartPoint>& start_override = std::nullopt);

/// Variant starting from a fully specified iterate (multipliers included)
/// instead of the initialization rule.
RunResult solve_from(const BilevelProblem& problem, const SolverConfig& config,
                     const Iterate& start);

}  // namespace bilevel_lm
