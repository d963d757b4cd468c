#pragma once

#include "bilevel_lm/metrics.hpp"
#include "bilevel_lm/solver.hpp"
#include "bilevel_lm/studies.hpp"

#include <ostream>
#include <string>

namespace bilevel_lm {

/// Formats a double with 17 significant digits ("%.17g"), so identical runs
/// serialize to identical bytes and values round-trip exactly.
std::string format_double(double v);

/// Trace CSV, columns:
/// iter,lambda,mu,alpha,gamma,backtracks,residual_smoothed,residual_unsmoothed
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace);

/// Per-run metrics as a small JSON object.
void write_metrics_json(std::ostream& out, const std::string& problem, const std::string& lambda_mode,
                        const MetricsReport& metrics);

/// Sweep CSV, one row per cell:
/// problem,lambda_mode,lambda,iterations,stop_reason,final_error,
/// upper_rel_error,lower_rel_error,eoc,final_stepsize
void write_sweep_csv(std::ostream& out, const SweepReport& report);

/// Sweep summary JSON: lambda_best per problem plus recovery counts and
/// percentages at the 10/20/25% absolute relative-error thresholds.
void write_sweep_summary_json(std::ostream& out, const SweepReport& report);

/// problem,observed,blowup_iteration,lambda_ill,blowup_factor
void write_ill_csv(std::ostream& out, const std::vector<IllBehaviourRow>& rows);

/// problem,error_star,k_bar,lambda_bar,k_star,lambda_star
void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows);

/// problem,classification
void write_calm_csv(std::ostream& out, const std::vector<CalmRow>& rows);

/// Machine-readable problem listing: JSON array of
/// {name, n, m, p, q, has_known_solution}.
void write_problem_list_json(std::ostream& out);

}  // namespace bilevel_lm
