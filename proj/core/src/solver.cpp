#include "bilevel_lm/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bilevel_lm {

namespace {
constexpr int kMaxBacktracks = 60;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::criterion1: return "criterion_1";
        case StopReason::criterion2: return "criterion_2";
        case StopReason::criterion3: return "criterion_3";
        case StopReason::criterion4: return "criterion_4";
        case StopReason::criterion5: return "criterion_5";
        case StopReason::criterion6: return "criterion_6";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::line_search_failure: return "line_search_failure";
        case StopReason::non_finite: return "non_finite";
    }
    return "unknown";
}

Iterate initialize_iterate(const BilevelProblem& problem,
                           const std::optional<StartPoint>& start_override) {
    Vec x0 = Vec::Ones(problem.n);
    Vec y0 = Vec::Ones(problem.m);
    const StartPoint* start = nullptr;
    if (start_override) {
        start = &*start_override;
    } else if (problem.default_start) {
        start = &*problem.default_start;
    }
    if (start != nullptr) {
        if (start->x.size() != problem.n || start->y.size() != problem.m) {
            throw std::invalid_argument("initialize_iterate: start dimensions do not match problem '" +
                                        problem.name + "'");
        }
        x0 = start->x;
        y0 = start->y;
    }

    Iterate z = Iterate::for_problem(problem);
    z.x() = x0;
    z.y() = y0;
    if (problem.p > 0) {
        const Vec g0 = problem.eval_g(x0, y0);
        z.u() = (-g0).cwiseMax(0.01);
        z.w() = z.u();
    }
    if (problem.q > 0) {
        const Vec G0 = problem.eval_G(x0, y0);
        z.v() = (-G0).cwiseMax(0.01);
    }
    return z;
}

Vec lm_direction(const Mat& jacobian, const Vec& residual, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("lm_direction: alpha must be positive");
    if (!jacobian.allFinite() || !residual.allFinite()) {
        throw std::runtime_error("lm_direction: non-finite Jacobian or residual");
    }
    const Vec rhs = -(jacobian.transpose() * residual);
    if (rhs.isZero(0.0)) return Vec::Zero(jacobian.cols());
    Mat normal = jacobian.transpose() * jacobian;
    normal.diagonal().array() += alpha;
    const Vec d = normal.partialPivLu().solve(rhs);
    if (!d.allFinite()) {
        throw std::runtime_error("lm_direction: linear solve produced non-finite values");
    }
    return d;
}

double lm_parameter(double residual_norm, double eta, bool previous_increase, double alpha_boost) {
    if (previous_increase) return alpha_boost * residual_norm;
    return std::pow(residual_norm, eta);
}

LineSearchResult armijo_backtrack(const BilevelProblem& problem, const Iterate& z, const Vec& d,
                                  const PenaltySmoothingState& state, const SolverConfig& config) {
    const Vec r0 = assemble_residual(problem, z, state);
    const Mat J = assemble_jacobian(problem, z, state);
    const double phi0 = r0.squaredNorm();
    // Exact gradient of ||r||^2 along d.
    const double slope = (2.0 * (J.transpose() * r0)).dot(d);

    LineSearchResult res;
    res.gamma = config.gamma0;
    for (res.backtracks = 0; res.backtracks <= kMaxBacktracks; ++res.backtracks) {
        Iterate trial = z;
        trial.stacked() += res.gamma * d;
        const Vec rt = assemble_residual(problem, trial, state);
        const double phi = rt.squaredNorm();
        if (std::isfinite(phi) && phi < phi0 + config.sigma * res.gamma * slope) {
            res.success = true;
            return res;
        }
        res.gamma *= config.rho;
    }
    res.backtracks = kMaxBacktracks;
    res.success = false;
    return res;
}

std::optional<StopReason> check_stop(const std::vector<IterationRecord>& trace,
                                     const SolverConfig& config) {
    if (trace.empty()) return std::nullopt;
    const IterationRecord& cur = trace.back();
    const int k = cur.k;

    // Criterion 1 covers both stated forms of the tolerance test: the smoothed
    // norm (algorithm Step 1) and the unsmoothed Error (practical criteria list).
    if (config.criteria_enabled[0] &&
        (cur.residual_norm < config.epsilon || cur.unsmoothed_residual_norm < config.epsilon)) {
        return StopReason::criterion1;
    }
    if (trace.size() >= 2) {
        const double gap = trace[trace.size() - 2].unsmoothed_residual_norm -
                           cur.unsmoothed_residual_norm;
        if (config.criteria_enabled[1] && std::abs(gap) < 1e-9) return StopReason::criterion2;
        if (config.criteria_enabled[2] && std::abs(gap) < 1e-4 && k > 200) {
            return StopReason::criterion3;
        }
        if (config.criteria_enabled[3] && gap < 0.0 && cur.unsmoothed_residual_norm < 10.0 &&
            k > 175) {
            return StopReason::criterion4;
        }
    }
    if (config.criteria_enabled[4] && cur.unsmoothed_residual_norm < 1e-2 && k > 500) {
        return StopReason::criterion5;
    }
    if (config.criteria_enabled[5] && cur.unsmoothed_residual_norm > 1e2 && k > 200) {
        return StopReason::criterion6;
    }
    return std::nullopt;
}

RunResult solve(const BilevelProblem& problem, const SolverConfig& config,
                const std::optional<StartPoint>& start_override) {
    return solve_from(problem, config, initialize_iterate(problem, start_override));
}

RunResult solve_from(const BilevelProblem& problem, const SolverConfig& config,
                     const Iterate& start) {
    const auto t0 = std::chrono::steady_clock::now();

    RunResult result;
    result.final_z = start;
    result.stop_reason = StopReason::max_iterations;
    Iterate& z = result.final_z;

    for (int k = 0; k <= config.max_iters; ++k) {
        const PenaltySmoothingState state{config.lambda_schedule.at(k), config.mu_schedule.at(k)};

        Vec r_smooth, r_exact;
        try {
            r_smooth = assemble_residual(problem, z, state);
            r_exact = assemble_residual(problem, z, {state.lambda, 0.0});
        } catch (const std::domain_error&) {
            result.stop_reason = StopReason::non_finite;
            break;
        }

        IterationRecord rec;
        rec.k = k;
        rec.lambda_k = state.lambda;
        rec.mu_k = state.mu;
        rec.residual_norm = r_smooth.norm();
        rec.unsmoothed_residual_norm = r_exact.norm();
        rec.z_snapshot = z.stacked();
        result.trace.push_back(rec);

        if (!r_smooth.allFinite() || !r_exact.allFinite()) {
            result.stop_reason = StopReason::non_finite;
            break;
        }
        if (const auto stop = check_stop(result.trace, config)) {
            result.stop_reason = *stop;
            break;
        }
        if (k == config.max_iters) {
            result.stop_reason = StopReason::max_iterations;
            break;
        }

        // Steepest-descent fallback when the previous step increased the Error.
        const bool increased =
            result.trace.size() >= 2 &&
            rec.unsmoothed_residual_norm >
                result.trace[result.trace.size() - 2].unsmoothed_residual_norm;
        const double alpha = lm_parameter(rec.unsmoothed_residual_norm, config.eta, increased,
                                          config.alpha_boost);
        result.trace.back().alpha_k = alpha;
        if (alpha <= 0.0) {
            // Exact root of the unsmoothed system with criterion 1 disabled or
            // not yet triggered on the smoothed norm; nothing sensible to do.
            result.stop_reason = StopReason::criterion1;
            break;
        }

        Vec d;
        try {
            const Mat J = assemble_jacobian(problem, z, state);
            d = lm_direction(J, r_smooth, alpha);
        } catch (const std::exception&) {
            result.stop_reason = StopReason::non_finite;
            break;
        }

        const LineSearchResult ls = armijo_backtrack(problem, z, d, state, config);
        result.trace.back().gamma_k = ls.gamma;
        result.trace.back().backtrack_count = ls.backtracks;
        if (!ls.success) {
            result.stop_reason = StopReason::line_search_failure;
            break;
        }

        z.stacked() += ls.gamma * d;
        if (!z.stacked().allFinite()) {
            result.stop_reason = StopReason::non_finite;
            break;
        }
    }

    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace bilevel_lm
