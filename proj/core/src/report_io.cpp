#include "bilevel_lm/report_io.hpp"

#include "bilevel_lm/problem_library.hpp"

#include <cstdio>

namespace bilevel_lm {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string opt_double(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string opt_int(const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
}

std::string json_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("null");
}

std::string lambda_mode_label(const SweepCell& cell) {
    if (cell.varying_lambda) return "varying";
    return "fixed:" + format_double(cell.fixed_lambda);
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace) {
    out << "iter,lambda,mu,alpha,gamma,backtracks,residual_smoothed,residual_unsmoothed\n";
    for (const auto& rec : trace) {
        out << rec.k << ',' << format_double(rec.lambda_k) << ',' << format_double(rec.mu_k) << ','
            << format_double(rec.alpha_k) << ',' << format_double(rec.gamma_k) << ','
            << rec.backtrack_count << ',' << format_double(rec.residual_norm) << ','
            << format_double(rec.unsmoothed_residual_norm) << '\n';
    }
}

void write_metrics_json(std::ostream& out, const std::string& problem,
                        const std::string& lambda_mode, const MetricsReport& metrics) {
    out << "{\n"
        << "  \"problem\": \"" << problem << "\",\n"
        << "  \"lambda_mode\": \"" << lambda_mode << "\",\n"
        << "  \"iterations\": " << metrics.iterations << ",\n"
        << "  \"stop_reason\": \"" << to_string(metrics.stop_reason) << "\",\n"
        << "  \"final_error\": " << format_double(metrics.final_error) << ",\n"
        << "  \"final_stepsize\": " << format_double(metrics.final_stepsize) << ",\n"
        << "  \"upper_rel_error\": " << json_opt(metrics.upper_rel_error) << ",\n"
        << "  \"lower_rel_error\": " << json_opt(metrics.lower_rel_error) << ",\n"
        << "  \"eoc\": " << json_opt(metrics.eoc) << ",\n"
        << "  \"converged_to_exact_root\": " << (metrics.converged_to_exact_root ? "true" : "false")
        << "\n}\n";
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "problem,lambda_mode,lambda,iterations,stop_reason,final_error,"
           "upper_rel_error,lower_rel_error,eoc,final_stepsize\n";
    for (const auto& cell : report.cells) {
        out << cell.problem << ',' << (cell.varying_lambda ? "varying" : "fixed") << ','
            << (cell.varying_lambda ? std::string() : format_double(cell.fixed_lambda)) << ',';
        if (!cell.error.empty()) {
            out << ",error:" << cell.error << ",,,,,\n";
            continue;
        }
        const MetricsReport& m = cell.metrics;
        out << m.iterations << ',' << to_string(m.stop_reason) << ',' << format_double(m.final_error)
            << ',' << opt_double(m.upper_rel_error) << ',' << opt_double(m.lower_rel_error) << ','
            << opt_double(m.eoc) << ',' << format_double(m.final_stepsize) << '\n';
    }
}

void write_sweep_summary_json(std::ostream& out, const SweepReport& report) {
    out << "{\n  \"lambda_best\": {";
    bool first = true;
    for (const auto& [name, lambda] : report.lambda_best) {
        out << (first ? "\n" : ",\n") << "    \"" << name << "\": " << format_double(lambda);
        first = false;
    }
    out << "\n  },\n";
    const RecoveryCounts& r = report.recovery;
    auto pct = [&](int count) {
        return r.with_known_solution == 0 ? 0.0 : 100.0 * count / r.with_known_solution;
    };
    out << "  \"recovery\": {\n"
        << "    \"with_known_solution\": " << r.with_known_solution << ",\n"
        << "    \"within_10_percent\": " << r.within_10 << ",\n"
        << "    \"within_20_percent\": " << r.within_20 << ",\n"
        << "    \"within_25_percent\": " << r.within_25 << ",\n"
        << "    \"within_10_percent_share\": " << format_double(pct(r.within_10)) << ",\n"
        << "    \"within_20_percent_share\": " << format_double(pct(r.within_20)) << ",\n"
        << "    \"within_25_percent_share\": " << format_double(pct(r.within_25)) << "\n"
        << "  }\n}\n";
}

void write_ill_csv(std::ostream& out, const std::vector<IllBehaviourRow>& rows) {
    out << "problem,observed,blowup_iteration,lambda_ill,blowup_factor\n";
    for (const auto& row : rows) {
        out << row.problem << ',' << (row.observed ? "true" : "false") << ','
            << opt_int(row.blowup_iteration) << ',' << opt_double(row.lambda_ill) << ','
            << format_double(row.blowup_factor) << '\n';
    }
}

void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows) {
    out << "problem,error_star,k_bar,lambda_bar,k_star,lambda_star\n";
    for (const auto& row : rows) {
        out << row.problem << ',' << format_double(row.error_star) << ',' << opt_int(row.k_bar)
            << ',' << opt_double(row.lambda_bar) << ',' << opt_int(row.k_star) << ','
            << opt_double(row.lambda_star) << '\n';
    }
}

void write_calm_csv(std::ostream& out, const std::vector<CalmRow>& rows) {
    out << "problem,classification\n";
    for (const auto& row : rows) {
        out << row.problem << ',' << to_string(row.classification) << '\n';
    }
}

void write_problem_list_json(std::ostream& out) {
    out << "[\n";
    const auto names = problem_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const BilevelProblem prob = get_problem(names[i]);
        out << "  {\"name\": \"" << prob.name << "\", \"n\": " << prob.n << ", \"m\": " << prob.m
            << ", \"p\": " << prob.p << ", \"q\": " << prob.q << ", \"has_known_solution\": "
            << (prob.known_solution ? "true" : "false") << '}' << (i + 1 < names.size() ? "," : "")
            << '\n';
    }
    out << "]\n";
}

}  // namespace bilevel_lm
