#include "bilevel_lm/studies.hpp"

#include "bilevel_lm/problem_library.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bilevel_lm;
using namespace bilevel_lm::testing;

TEST_CASE("default fixed penalty grid: ten decades from 1e6 down to 1e-3") {
    const auto grid = default_fixed_lambda_grid();
    REQUIRE(grid.size() == 10);
    CHECK(grid.front() == doctest::Approx(1e6));
    CHECK(grid.back() == doctest::Approx(1e-3));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] == doctest::Approx(grid[i - 1] / 10.0));
}

TEST_CASE("geometric penalty ramp reaches about 6.02 at iteration 51") {
    const double lambda51 = PenaltySchedule::geometric().at(51);
    CHECK(lambda51 == doctest::Approx(6.02).epsilon(5e-3));
}

TEST_CASE("run_sweep: cell count, lambda_best, recovery bookkeeping") {
    SweepSpec spec;
    spec.problems = {"CalmLinear1", "LampariellloSagratella2017Ex33"};
    spec.config.max_iters = 120;
    const SweepReport report = run_sweep(spec);

    // Ten fixed grid values plus the varying ramp per problem.
    CHECK(report.cells.size() == 22);
    int varying = 0;
    for (const auto& cell : report.cells) {
        if (cell.varying_lambda) ++varying;
    }
    CHECK(varying == 2);

    CHECK(report.recovery.with_known_solution == 2);
    CHECK(report.recovery.within_10 <= report.recovery.within_20);
    CHECK(report.recovery.within_20 <= report.recovery.within_25);
    CHECK(report.recovery.within_25 <= report.recovery.with_known_solution);

    for (const auto& [name, lambda] : report.lambda_best) {
        CAPTURE(name);
        bool on_grid = false;
        for (double v : spec.fixed_lambdas) on_grid = on_grid || lambda == v;
        CHECK(on_grid);
    }
}

TEST_CASE("run_sweep: per-problem results do not depend on sweep order") {
    SweepSpec forward;
    forward.problems = {"CalmLinear1", "CalmLinear3"};
    forward.fixed_lambdas = {1.0, 1e-2};
    forward.config.max_iters = 100;

    SweepSpec backward = forward;
    backward.problems = {"CalmLinear3", "CalmLinear1"};

    const SweepReport a = run_sweep(forward);
    const SweepReport b = run_sweep(backward);
    REQUIRE(a.cells.size() == b.cells.size());

    auto find_cell = [](const SweepReport& rep, const std::string& name, bool varying,
                        double lambda) -> const SweepCell& {
        for (const auto& cell : rep.cells) {
            if (cell.problem == name && cell.varying_lambda == varying &&
                (varying || cell.fixed_lambda == lambda)) {
                return cell;
            }
        }
        throw std::logic_error("cell not found");
    };

    for (const auto& cell : a.cells) {
        const SweepCell& other =
            find_cell(b, cell.problem, cell.varying_lambda, cell.fixed_lambda);
        CHECK(cell.metrics.final_error == other.metrics.final_error);
        CHECK(cell.metrics.iterations == other.metrics.iterations);
        CHECK(cell.error == other.error);
    }
    CHECK(a.lambda_best == b.lambda_best);
}

TEST_CASE("first_blowup_iteration: synthetic Error sequences") {
    SUBCASE("nonincreasing sequences are never flagged") {
        std::vector<double> errors;
        for (int k = 0; k < 1000; ++k) errors.push_back(1.0 / (1.0 + k));
        CHECK_FALSE(first_blowup_iteration(errors, 1e3).has_value());
    }
    SUBCASE("permanent departure at iteration 600") {
        std::vector<double> errors;
        for (int k = 0; k < 600; ++k) errors.push_back(0.1 + 0.9 / (1.0 + k));
        for (int k = 600; k < 1000; ++k) errors.push_back(1e4);
        const auto hit = first_blowup_iteration(errors, 1e3);
        REQUIRE(hit.has_value());
        CHECK(*hit == 600);
        // The implied penalty value at the flagged iteration.
        CHECK(PenaltySchedule::geometric().at(*hit) ==
              doctest::Approx(0.5 * std::pow(1.05, 600)));
    }
    SUBCASE("a transient spike that comes back is not a blow-up") {
        std::vector<double> errors(1000, 0.1);
        errors[300] = 1e4;
        for (int k = 301; k < 1000; ++k) errors[k] = 0.05;
        CHECK_FALSE(first_blowup_iteration(errors, 1e3).has_value());
    }
    SUBCASE("non-finite entries are flagged immediately") {
        std::vector<double> errors(100, 0.1);
        errors[40] = std::numeric_limits<double>::quiet_NaN();
        const auto hit = first_blowup_iteration(errors, 1e3);
        REQUIRE(hit.has_value());
        CHECK(*hit == 40);
    }
}

TEST_CASE("thresholds_from_errors: small and large penalty thresholds") {
    const PenaltySchedule ramp = PenaltySchedule::geometric();

    SUBCASE("isolated early hit, next hit past iteration 50") {
        std::vector<double> errors(400, 10.0);
        errors[12] = 1.05;  // within 1.1 * error_star for error_star = 1
        errors[190] = 1.0;
        const ThresholdRow row = thresholds_from_errors(errors, 1.0);
        REQUIRE(row.k_bar.has_value());
        CHECK(*row.k_bar == 12);
        CHECK(*row.lambda_bar == doctest::Approx(ramp.at(12)));
        REQUIRE(row.k_star.has_value());
        CHECK(*row.k_star == 190);
        CHECK(*row.lambda_star == doctest::Approx(ramp.at(190)));
    }
    SUBCASE("continuous satisfaction from iteration 51 on") {
        std::vector<double> errors(400, 10.0);
        for (int k = 51; k < 400; ++k) errors[k] = 0.9;
        const ThresholdRow row = thresholds_from_errors(errors, 1.0);
        REQUIRE(row.k_bar.has_value());
        CHECK(*row.k_bar == 51);
        REQUIRE(row.k_star.has_value());
        CHECK(*row.k_star == 51);
        CHECK(*row.lambda_star == doctest::Approx(6.02).epsilon(5e-3));
    }
    SUBCASE("no hit leaves both thresholds absent") {
        const std::vector<double> errors(200, 10.0);
        const ThresholdRow row = thresholds_from_errors(errors, 1.0);
        CHECK_FALSE(row.k_bar.has_value());
        CHECK_FALSE(row.k_star.has_value());
    }
}

TEST_CASE("thresholds: the small threshold never exceeds the large one") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> errors(300);
        for (auto& e : errors) e = dist(rng);
        const ThresholdRow row = thresholds_from_errors(errors, 0.5);
        if (row.k_bar && row.k_star) {
            CHECK(*row.k_bar <= *row.k_star);
            CHECK(*row.lambda_bar <= *row.lambda_star);
        }
    }
}

TEST_CASE("classify_error_trace: synthetic scenarios") {
    SUBCASE("steady decrease is stable") {
        std::vector<double> errors;
        for (int k = 0; k < 1000; ++k) errors.push_back(std::pow(0.99, k));
        CHECK(classify_error_trace(errors) == TraceClass::stable);
    }
    SUBCASE("flat trace is stable") {
        CHECK(classify_error_trace(std::vector<double>(500, 0.3)) == TraceClass::stable);
    }
    SUBCASE("sustained late departure is retain-then-blowup") {
        std::vector<double> errors(800, 1e-3);
        for (int k = 0; k < 200; ++k) errors.push_back(1e-3 * std::pow(10.0, 1.0 + k * 0.05));
        CHECK(classify_error_trace(errors) == TraceClass::retain_then_blowup);
    }
    SUBCASE("decade-sized alternations are zigzag") {
        std::vector<double> errors;
        for (int k = 0; k < 200; ++k) errors.push_back(k % 2 == 0 ? 1e-3 : 1e2);
        CHECK(classify_error_trace(errors) == TraceClass::zigzag);
    }
    SUBCASE("overflow entries count as departed") {
        std::vector<double> errors(900, 1e-3);
        errors.resize(1000, std::numeric_limits<double>::infinity());
        CHECK(classify_error_trace(errors) == TraceClass::retain_then_blowup);
    }
    SUBCASE("short traces default to stable") {
        CHECK(classify_error_trace({}) == TraceClass::stable);
        CHECK(classify_error_trace({0.5}) == TraceClass::stable);
    }
}

TEST_CASE("trace class names round-trip to strings") {
    CHECK(to_string(TraceClass::stable) == "stable");
    CHECK(to_string(TraceClass::retain_then_blowup) == "retain_then_blowup");
    CHECK(to_string(TraceClass::zigzag) == "zigzag");
}

TEST_CASE("study drivers run end to end on a small instance") {
    const BilevelProblem prob = get_problem("LampariellloSagratella2017Ex33");

    const IllBehaviourRow ill = detect_lambda_ill(prob, 120);
    CHECK(ill.problem == prob.name);
    if (ill.observed) {
        REQUIRE(ill.blowup_iteration.has_value());
        REQUIRE(ill.lambda_ill.has_value());
        CHECK(*ill.lambda_ill ==
              doctest::Approx(PenaltySchedule::geometric().at(*ill.blowup_iteration)));
    }

    const ThresholdRow thresholds = detect_thresholds(prob, 1e-3, 120);
    CHECK(thresholds.problem == prob.name);
    if (thresholds.k_bar && thresholds.k_star) CHECK(*thresholds.k_bar <= *thresholds.k_star);

    const CalmRow calm = partial_calmness_fixture_check(prob, 120);
    CHECK(calm.problem == prob.name);
    CHECK_FALSE(to_string(calm.classification) == "unknown");
}
