#include "bilevel_lm/studies.hpp"

#include "bilevel_lm/problem_library.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bilevel_lm {

std::vector<double> default_fixed_lambda_grid() {
    std::vector<double> grid;
    for (int e = 6; e >= -3; --e) grid.push_back(std::pow(10.0, e));
    return grid;
}

namespace {

SweepCell run_cell(const BilevelProblem& problem, const SweepSpec& spec, bool varying,
                   double fixed_lambda) {
    SweepCell cell;
    cell.problem = problem.name;
    cell.varying_lambda = varying;
    cell.fixed_lambda = fixed_lambda;
    try {
        SolverConfig config = spec.config;
        config.lambda_schedule =
            varying ? PenaltySchedule::geometric() : PenaltySchedule::fixed(fixed_lambda);
        const RunResult result = solve(problem, config);
        cell.metrics = compute_metrics(problem, result);
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

SweepReport run_sweep(const SweepSpec& spec) {
    SweepReport report;
    for (const auto& name : spec.problems) {
        const BilevelProblem problem = get_problem(name);

        double best_abs = std::numeric_limits<double>::infinity();
        double best_lambda = 0.0;
        bool have_best = false;
        for (double lambda : spec.fixed_lambdas) {
            SweepCell cell = run_cell(problem, spec, false, lambda);
            if (cell.error.empty() && cell.metrics.upper_rel_error) {
                const double abs_err = std::abs(*cell.metrics.upper_rel_error);
                if (std::isfinite(abs_err) &&
                    (abs_err < best_abs || (abs_err == best_abs && lambda < best_lambda))) {
                    best_abs = abs_err;
                    best_lambda = lambda;
                    have_best = true;
                }
            }
            report.cells.push_back(std::move(cell));
        }
        if (spec.include_varying) {
            report.cells.push_back(run_cell(problem, spec, true, 0.0));
        }

        if (problem.known_solution) {
            ++report.recovery.with_known_solution;
            if (have_best) {
                report.lambda_best[name] = best_lambda;
                if (best_abs <= 0.10) ++report.recovery.within_10;
                if (best_abs <= 0.20) ++report.recovery.within_20;
                if (best_abs <= 0.25) ++report.recovery.within_25;
            }
        }
    }
    return report;
}

std::optional<int> first_blowup_iteration(const std::vector<double>& errors, double blowup_factor) {
    const int count = static_cast<int>(errors.size());

    // Suffix minima over finite values; non-finite entries count as +inf.
    std::vector<double> suffix_min(count + 1, std::numeric_limits<double>::infinity());
    for (int k = count - 1; k >= 0; --k) {
        const double e =
            std::isfinite(errors[k]) ? errors[k] : std::numeric_limits<double>::infinity();
        suffix_min[k] = std::min(e, suffix_min[k + 1]);
    }

    double running_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
        if (!std::isfinite(errors[k])) return k;
        if (k > 0 && errors[k] > blowup_factor * running_min && suffix_min[k] > running_min) {
            return k;
        }
        running_min = std::min(running_min, errors[k]);
    }
    return std::nullopt;
}

IllBehaviourRow detect_lambda_ill(const BilevelProblem& problem, int iters, double blowup_factor) {
    IllBehaviourRow row;
    row.problem = problem.name;
    row.blowup_factor = blowup_factor;

    SolverConfig config = SolverConfig::study_override();
    config.max_iters = iters;
    config.lambda_schedule = PenaltySchedule::geometric();
    const RunResult result = solve(problem, config);

    std::vector<double> errors;
    errors.reserve(result.trace.size());
    for (const auto& rec : result.trace) errors.push_back(rec.unsmoothed_residual_norm);

    if (const auto k = first_blowup_iteration(errors, blowup_factor)) {
        row.observed = true;
        row.blowup_iteration = *k;
        row.lambda_ill = config.lambda_schedule.at(*k);
    }
    return row;
}

ThresholdRow thresholds_from_errors(const std::vector<double>& errors, double error_star) {
    ThresholdRow row;
    row.error_star = error_star;
    const PenaltySchedule schedule = PenaltySchedule::geometric();
    for (int k = 0; k < static_cast<int>(errors.size()); ++k) {
        const bool hit = errors[k] <= 1.1 * error_star;
        if (hit && !row.k_bar) {
            row.k_bar = k;
            row.lambda_bar = schedule.at(k);
        }
        if (hit && k > 50 && !row.k_star) {
            row.k_star = k;
            row.lambda_star = schedule.at(k);
        }
        if (row.k_bar && row.k_star) break;
    }
    return row;
}

ThresholdRow detect_thresholds(const BilevelProblem& problem, double error_star, int iters) {
    SolverConfig config = SolverConfig::study_override();
    config.max_iters = iters;
    config.lambda_schedule = PenaltySchedule::geometric();
    const RunResult result = solve(problem, config);

    std::vector<double> errors;
    errors.reserve(result.trace.size());
    for (const auto& rec : result.trace) errors.push_back(rec.unsmoothed_residual_norm);

    ThresholdRow row = thresholds_from_errors(errors, error_star);
    row.problem = problem.name;
    return row;
}

std::string to_string(TraceClass c) {
    switch (c) {
        case TraceClass::stable: return "stable";
        case TraceClass::retain_then_blowup: return "retain_then_blowup";
        case TraceClass::zigzag: return "zigzag";
    }
    return "unknown";
}

TraceClass classify_error_trace(const std::vector<double>& errors) {
    if (errors.size() < 2) return TraceClass::stable;

    const double huge = 300.0;  // log10 stand-in for overflow/NaN entries
    auto log_err = [&](double e) {
        if (!std::isfinite(e)) return huge;
        return std::log10(std::max(e, 1e-300));
    };

    // Count decade-sized swings of alternating direction.
    int alternations = 0;
    int dir = 0;
    double ext = log_err(errors[0]);
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double v = log_err(errors[i]);
        if (dir == 0) {
            if (v - ext >= 1.0) dir = 1;
            else if (ext - v >= 1.0) dir = -1;
            if (dir != 0) ext = v;
        } else if (dir == 1) {
            if (v > ext) ext = v;
            else if (ext - v >= 1.0) {
                dir = -1;
                ext = v;
                ++alternations;
            }
        } else {
            if (v < ext) ext = v;
            else if (v - ext >= 1.0) {
                dir = 1;
                ext = v;
                ++alternations;
            }
        }
    }
    if (alternations >= 5) return TraceClass::zigzag;

    double min_err = std::numeric_limits<double>::infinity();
    for (double e : errors) {
        if (std::isfinite(e)) min_err = std::min(min_err, e);
    }
    if (!std::isfinite(min_err)) return TraceClass::retain_then_blowup;

    const double final_err = errors.back();
    const bool final_blown = !std::isfinite(final_err) || final_err >= 1e3 * min_err;
    if (final_blown) {
        // Sustained rise: the last tenth of the trace stays well above the minimum.
        const std::size_t tail_start = errors.size() - std::max<std::size_t>(1, errors.size() / 10);
        bool sustained = true;
        for (std::size_t i = tail_start; i < errors.size(); ++i) {
            if (std::isfinite(errors[i]) && errors[i] < 1e2 * min_err) {
                sustained = false;
                break;
            }
        }
        if (sustained) return TraceClass::retain_then_blowup;
    }
    return TraceClass::stable;
}

CalmRow partial_calmness_fixture_check(const BilevelProblem& problem, int iters) {
    SolverConfig config = SolverConfig::study_override();
    config.max_iters = iters;
    config.lambda_schedule = PenaltySchedule::geometric();
    const RunResult result = solve(problem, config);

    std::vector<double> errors;
    errors.reserve(result.trace.size());
    for (const auto& rec : result.trace) errors.push_back(rec.unsmoothed_residual_norm);

    CalmRow row;
    row.problem = problem.name;
    row.classification = classify_error_trace(errors);
    return row;
}

}  // namespace bilevel_lm
