#pragma once

#include "bilevel_lm/problem.hpp"
#include "bilevel_lm/solver.hpp"

#include <optional>

namespace bilevel_lm {

struct MetricsReport {
    std::optional<double> upper_rel_error;
    std::optional<double> lower_rel_error;
    std::optional<double> eoc;
    bool converged_to_exact_root = false;  // EOC absent because a norm hit 0
    double final_stepsize = 0.0;
    double final_error = 0.0;  // Error* = ||residual(z*)|| unsmoothed
    int iterations = 0;
    StopReason stop_reason = StopReason::max_iterations;
    double cpu_seconds = 0.0;
};

/// Signed relative error (F_A - F_K) / (1 + |F_K|).
double upper_level_relative_error(double F_A, double F_K);

/// Signed relative error (f_A - f_K) / (1 + |f_K|).
double lower_level_relative_error(double f_A, double f_K);

/// EOC from the last three unsmoothed residual norms:
///   max{ log||r_{K-1}|| / log||r_{K-2}||, log||r_K|| / log||r_{K-1}|| }.
/// Absent when fewer than 3 records, any of the three norms is 0 (exact
/// root), or any is >= 1 (log-ratio loses meaning).
std::optional<double> experimental_order_of_convergence(const std::vector<IterationRecord>& trace);

/// Same rule on a bare norm sequence; used by the trace analysis and tests.
std::optional<double> eoc_from_norms(const std::vector<double>& norms);

/// Hand-annotated feasibility class of the problem's lower level. Throws
/// std::logic_error when a problem ships without the annotation.
FeasibilityClass feasibility_class(const BilevelProblem& problem);

MetricsReport compute_metrics(const BilevelProblem& problem, const RunResult& result);

}  // namespace bilevel_lm
