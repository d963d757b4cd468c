#pragma once

#include "bilevel_lm/metrics.hpp"
#include "bilevel_lm/problem.hpp"
#include "bilevel_lm/solver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bilevel_lm {

/// The ten-value fixed penalty grid {1e6, 1e5, ..., 1e-3}.
std::vector<double> default_fixed_lambda_grid();

struct SweepSpec {
    std::vector<std::string> problems;
    std::vector<double> fixed_lambdas = default_fixed_lambda_grid();
    bool include_varying = true;
    SolverConfig config;  // per-cell base configuration; lambda schedule is overridden per cell
};

struct SweepCell {
    std::string problem;
    bool varying_lambda = false;
    double fixed_lambda = 0.0;  // meaningful when !varying_lambda
    MetricsReport metrics;
    std::string error;  // nonempty when the cell failed to run
};

struct RecoveryCounts {
    int with_known_solution = 0;
    int within_10 = 0;
    int within_20 = 0;
    int within_25 = 0;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    /// Best fixed lambda per problem (minimizing |upper_rel_error|, ties toward
    /// smaller lambda); absent for problems without a known solution.
    std::map<std::string, double> lambda_best;
    /// Recovery at best fixed lambda, thresholds 10/20/25% absolute rel. error.
    RecoveryCounts recovery;
};

SweepReport run_sweep(const SweepSpec& spec);

struct IllBehaviourRow {
    std::string problem;
    bool observed = false;
    std::optional<int> blowup_iteration;
    std::optional<double> lambda_ill;
    double blowup_factor = 1e3;
};

/// Blow-up detection predicate on a bare Error sequence: the first index whose
/// value is non-finite, or exceeds blowup_factor times the minimum seen so far
/// and never returns below that minimum afterwards.
std::optional<int> first_blowup_iteration(const std::vector<double>& errors, double blowup_factor);

/// Runs the geometric lambda ramp with all stopping criteria disabled and
/// flags the first iteration whose Error departs from the running minimum by
/// the blow-up factor without ever coming back, or turns non-finite.
IllBehaviourRow detect_lambda_ill(const BilevelProblem& problem, int iters = 1000,
                                  double blowup_factor = 1e3);

struct ThresholdRow {
    std::string problem;
    double error_star = 0.0;
    std::optional<int> k_bar;
    std::optional<double> lambda_bar;
    std::optional<int> k_star;
    std::optional<double> lambda_star;
};

/// Threshold extraction on a bare Error sequence indexed by iteration, under
/// the geometric lambda ramp lambda_k = 0.5 * 1.05^k.
ThresholdRow thresholds_from_errors(const std::vector<double>& errors, double error_star);

/// Small threshold: lambda at the first k with Error_k <= 1.1 * error_star.
/// Large threshold: same condition restricted to k > 50. Geometric lambda,
/// standard criteria disabled, 1000 iterations.
ThresholdRow detect_thresholds(const BilevelProblem& problem, double error_star, int iters = 1000);

enum class TraceClass { stable, retain_then_blowup, zigzag };

std::string to_string(TraceClass c);

/// Classifies an Error trace into the three penalty-ramp scenarios.
/// Constants (documented in reports): a swing counts toward zig-zagging when
/// it spans at least one decade, five or more alternations classify as
/// zigzag; a final Error 1e3 times the running minimum that stays a factor
/// 1e2 above it over the last tenth of the trace classifies as
/// retain-then-blowup; everything else is stable.
TraceClass classify_error_trace(const std::vector<double>& errors);

struct CalmRow {
    std::string problem;
    TraceClass classification = TraceClass::stable;
};

/// 1000-iteration relaxed-criteria geometric-lambda run, classified.
CalmRow partial_calmness_fixture_check(const BilevelProblem& problem, int iters = 1000);

}  // namespace bilevel_lm
