// Command-line front end: solve single problems, run the penalty-parameter
// sweep, and reproduce the lambda studies. All numeric output is serialized
// with 17 significant digits so identical invocations are byte-identical.

#include "bilevel_lm/metrics.hpp"
#include "bilevel_lm/problem_library.hpp"
#include "bilevel_lm/report_io.hpp"
#include "bilevel_lm/solver.hpp"
#include "bilevel_lm/studies.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace bilevel_lm;

namespace {

struct CliOptions {
    std::string problem;
    std::vector<std::string> problems;
    std::string lambda_mode = "varying";
    double eta = 1.0;
    double epsilon = 1e-5;
    int max_iters = 1000;
    double sigma = 1e-2;
    double rho = 0.5;
    std::string output_dir = "out";
    std::string format = "both";
    bool emit_plot_data = false;  // documentation alias: the trace CSV is the plot input
};

PenaltySchedule parse_lambda_mode(const std::string& mode) {
    if (mode == "varying") return PenaltySchedule::geometric();
    if (mode.rfind("fixed:", 0) == 0) {
        const double value = std::stod(mode.substr(6));
        if (value <= 0.0) throw CLI::ValidationError("--lambda", "fixed lambda must be positive");
        return PenaltySchedule::fixed(value);
    }
    throw CLI::ValidationError("--lambda", "expected 'varying' or 'fixed:<value>'");
}

SolverConfig make_config(const CliOptions& opts) {
    SolverConfig config;
    config.eta = opts.eta;
    config.epsilon = opts.epsilon;
    config.max_iters = opts.max_iters;
    config.sigma = opts.sigma;
    config.rho = opts.rho;
    config.lambda_schedule = parse_lambda_mode(opts.lambda_mode);
    return config;
}

std::vector<std::string> resolve_problems(const std::vector<std::string>& requested) {
    if (requested.empty() || (requested.size() == 1 && requested[0] == "all")) {
        return problem_names();
    }
    for (const auto& name : requested) get_problem(name);  // validate early
    return requested;
}

fs::path output_dir(const CliOptions& opts) {
    const char* env = std::getenv("BILEVEL_LM_OUT");
    fs::path dir = env != nullptr ? fs::path(env) : fs::path(opts.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    writer(out);
    std::cout << "wrote " << path.string() << '\n';
}

int cmd_list() {
    write_problem_list_json(std::cout);
    return 0;
}

int cmd_solve(const CliOptions& opts) {
    const BilevelProblem problem = get_problem(opts.problem);
    const SolverConfig config = make_config(opts);
    const RunResult result = solve(problem, config);
    const MetricsReport metrics = compute_metrics(problem, result);

    const fs::path dir = output_dir(opts);
    if (opts.format == "csv" || opts.format == "both") {
        write_file(dir / (problem.name + "_trace.csv"),
                   [&](std::ostream& out) { write_trace_csv(out, result.trace); });
    }
    if (opts.format == "json" || opts.format == "both") {
        write_file(dir / (problem.name + "_metrics.json"), [&](std::ostream& out) {
            write_metrics_json(out, problem.name, opts.lambda_mode, metrics);
        });
    }
    return 0;
}

int cmd_sweep(const CliOptions& opts) {
    SweepSpec spec;
    spec.problems = resolve_problems(opts.problems);
    spec.config = make_config(opts);
    spec.config.lambda_schedule = PenaltySchedule::geometric();  // per-cell override applies
    const SweepReport report = run_sweep(spec);

    const fs::path dir = output_dir(opts);
    if (opts.format == "csv" || opts.format == "both") {
        write_file(dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, report); });
    }
    if (opts.format == "json" || opts.format == "both") {
        write_file(dir / "sweep_summary.json",
                   [&](std::ostream& out) { write_sweep_summary_json(out, report); });
    }
    return 0;
}

int cmd_study_ill(const CliOptions& opts) {
    std::vector<IllBehaviourRow> rows;
    for (const auto& name : resolve_problems(opts.problems)) {
        rows.push_back(detect_lambda_ill(get_problem(name), opts.max_iters));
    }
    write_file(output_dir(opts) / "study_ill.csv",
               [&](std::ostream& out) { write_ill_csv(out, rows); });
    return 0;
}

int cmd_study_threshold(const CliOptions& opts) {
    // Error* comes from this artifact's own varying-lambda run for each problem.
    std::vector<ThresholdRow> rows;
    for (const auto& name : resolve_problems(opts.problems)) {
        const BilevelProblem problem = get_problem(name);
        SolverConfig base = make_config(opts);
        base.lambda_schedule = PenaltySchedule::geometric();
        const RunResult reference = solve(problem, base);
        const double error_star = reference.trace.back().unsmoothed_residual_norm;
        rows.push_back(detect_thresholds(problem, error_star, opts.max_iters));
    }
    write_file(output_dir(opts) / "study_threshold.csv",
               [&](std::ostream& out) { write_threshold_csv(out, rows); });
    return 0;
}

int cmd_study_calm(const CliOptions& opts) {
    std::vector<CalmRow> rows;
    for (const auto& name : resolve_problems(opts.problems)) {
        rows.push_back(partial_calmness_fixture_check(get_problem(name), opts.max_iters));
    }
    write_file(output_dir(opts) / "study_calm.csv",
               [&](std::ostream& out) { write_calm_csv(out, rows); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smoothed Levenberg-Marquardt solver for optimistic bilevel programs"};
    app.require_subcommand(1);
    CliOptions opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--eta", opts.eta, "LM parameter exponent in [1,2]");
        cmd->add_option("--epsilon", opts.epsilon, "residual tolerance");
        cmd->add_option("--max-iters", opts.max_iters, "iteration cap");
        cmd->add_option("--sigma", opts.sigma, "Armijo sufficient-decrease factor");
        cmd->add_option("--rho", opts.rho, "backtracking contraction factor");
        cmd->add_option("--out", opts.output_dir,
                        "output directory (BILEVEL_LM_OUT overrides)");
        cmd->add_option("--format", opts.format, "csv | json | both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
    };

    CLI::App* list = app.add_subcommand("list", "list shipped problems as JSON");
    (void)list;

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem");
    solve_cmd->add_option("--problem", opts.problem, "problem name")->required();
    solve_cmd->add_option("--lambda", opts.lambda_mode, "varying | fixed:<value>");
    solve_cmd->add_flag("--emit-plot-data", opts.emit_plot_data,
                        "alias flag: the trace CSV is the plot input");
    add_common(solve_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "fixed-grid + varying lambda sweep");
    sweep_cmd->add_option("--problems", opts.problems, "problem names or 'all'");
    add_common(sweep_cmd);

    CLI::App* ill_cmd = app.add_subcommand("study-ill", "lambda_ill detection study");
    ill_cmd->add_option("--problems", opts.problems, "problem names or 'all'");
    add_common(ill_cmd);

    CLI::App* thr_cmd = app.add_subcommand("study-threshold", "lambda_bar / lambda_star study");
    thr_cmd->add_option("--problems", opts.problems, "problem names or 'all'");
    add_common(thr_cmd);

    CLI::App* calm_cmd = app.add_subcommand("study-calm", "partially calm trace classification");
    calm_cmd->add_option("--problems", opts.problems, "problem names or 'all'");
    add_common(calm_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(list)) return cmd_list();
        if (app.got_subcommand(solve_cmd)) return cmd_solve(opts);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(opts);
        if (app.got_subcommand(ill_cmd)) return cmd_study_ill(opts);
        if (app.got_subcommand(thr_cmd)) return cmd_study_threshold(opts);
        if (app.got_subcommand(calm_cmd)) return cmd_study_calm(opts);
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
