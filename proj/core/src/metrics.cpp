#include "bilevel_lm/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace bilevel_lm {

double upper_level_relative_error(double F_A, double F_K) {
    return (F_A - F_K) / (1.0 + std::abs(F_K));
}

double lower_level_relative_error(double f_A, double f_K) {
    return (f_A - f_K) / (1.0 + std::abs(f_K));
}

std::optional<double> eoc_from_norms(const std::vector<double>& norms) {
    if (norms.size() < 3) return std::nullopt;
    const double a = norms[norms.size() - 3];
    const double b = norms[norms.size() - 2];
    const double c = norms[norms.size() - 1];
    for (double v : {a, b, c}) {
        // log-ratios only indicate contraction for norms in (0, 1)
        if (!(v > 0.0) || v >= 1.0 || !std::isfinite(v)) return std::nullopt;
    }
    return std::max(std::log(b) / std::log(a), std::log(c) / std::log(b));
}

std::optional<double> experimental_order_of_convergence(
    const std::vector<IterationRecord>& trace) {
    std::vector<double> norms;
    norms.reserve(trace.size());
    for (const auto& rec : trace) norms.push_back(rec.unsmoothed_residual_norm);
    return eoc_from_norms(norms);
}

FeasibilityClass feasibility_class(const BilevelProblem& problem) {
    if (!problem.lower_level_class) {
        throw std::logic_error("feasibility_class: problem '" + problem.name +
                               "' ships without a lower-level convexity annotation");
    }
    return *problem.lower_level_class;
}

MetricsReport compute_metrics(const BilevelProblem& problem, const RunResult& result) {
    MetricsReport report;
    report.stop_reason = result.stop_reason;
    report.cpu_seconds = result.wall_time;
    if (result.trace.empty()) return report;

    report.iterations = result.trace.back().k;
    report.final_error = result.trace.back().unsmoothed_residual_norm;

    for (auto it = result.trace.rbegin(); it != result.trace.rend(); ++it) {
        if (it->gamma_k > 0.0) {
            report.final_stepsize = it->gamma_k;
            break;
        }
    }

    report.eoc = experimental_order_of_convergence(result.trace);
    if (!report.eoc && result.trace.size() >= 3) {
        const auto& t = result.trace;
        report.converged_to_exact_root =
            t[t.size() - 1].unsmoothed_residual_norm == 0.0 ||
            t[t.size() - 2].unsmoothed_residual_norm == 0.0 ||
            t[t.size() - 3].unsmoothed_residual_norm == 0.0;
    }

    if (problem.known_solution) {
        const Vec x = result.final_z.x();
        const Vec y = result.final_z.y();
        const double F_A = problem.eval_F(x, y);
        const double f_A = problem.eval_f(x, y);
        report.upper_rel_error = upper_level_relative_error(F_A, problem.known_solution->F_K);
        report.lower_rel_error = lower_level_relative_error(f_A, problem.known_solution->f_K);
    }
    return report;
}

}  // namespace bilevel_lm
