#include "bilevel_lm/residual.hpp"

#include "bilevel_lm/problem_library.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bilevel_lm;
using namespace bilevel_lm::testing;

TEST_CASE("fb: hand-computed values") {
    CHECK(fb(0.0, 0.0) == doctest::Approx(0.0));
    CHECK(fb(3.0, 4.0) == doctest::Approx(-2.0));
    CHECK(fb(1.0, 0.0) == doctest::Approx(0.0));
    CHECK(fb(-1.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("fb: zero exactly on the complementarity set") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pos(0.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        // One coordinate zero, the other nonnegative: fb vanishes.
        const double a = pos(rng);
        CHECK(fb(a, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(fb(0.0, a) == doctest::Approx(0.0).epsilon(1e-14));

        // Both strictly positive, or any coordinate negative: fb is nonzero.
        const double b = pos(rng) + 0.1;
        CHECK(fb(a + 0.1, b) < 0.0);
        CHECK(fb(-(a + 0.1), b) > 0.0);
        CHECK(fb(a + 0.1, -b) > 0.0);
    }
}

TEST_CASE("fb_smoothed: values and reduction to fb at mu = 0") {
    CHECK(fb_smoothed(1.0, -1.0, 1.0) == doctest::Approx(0.0));
    CHECK(fb_smoothed(1.0, -1.0, 0.5) == doctest::Approx(std::sqrt(3.0) - 2.0));

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double u = dist(rng);
        const double g = dist(rng);
        CHECK(fb_smoothed(u, g, 0.0) == doctest::Approx(fb(u, -g)).epsilon(1e-14));
    }
}

TEST_CASE("fb_smoothed: root characterization u > 0, -g > 0, -u*g = mu") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> pos(0.05, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double u = pos(rng);
        const double g = -pos(rng);
        const double mu = -u * g;
        CHECK(fb_smoothed(u, g, mu) == doctest::Approx(0.0).epsilon(1e-13));

        // Perturbing the product off mu breaks the root.
        CHECK(std::abs(fb_smoothed(u, g, mu * 1.5)) > 1e-8);
        // Sign violations break the root too.
        CHECK(std::abs(fb_smoothed(-u, g, mu)) > 1e-8);
    }
}

TEST_CASE("assemble_residual: exact root of the penalized system") {
    const BilevelProblem prob = get_problem("LampariellloSagratella2017Ex33");
    Vec z(10);
    // x = 0.5, y = (0, 0.5), u = (1, 0.01, 0), v = (0), w = (0, 1, 0).
    z << 0.5, 0.0, 0.5, 1.0, 0.01, 0.0, 0.0, 0.0, 1.0, 0.0;
    const Iterate zbar(prob.n, prob.m, prob.p, prob.q, z);

    const Vec r = assemble_residual(prob, zbar, {0.01, 0.0});
    CHECK(r.size() == prob.num_residuals());
    CHECK(r.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("assemble_residual: smoothing shifts the complementarity rows") {
    const BilevelProblem prob = get_problem("LampariellloSagratella2017Ex33");
    Vec z(10);
    z << 0.5, 0.0, 0.5, 1.0, 0.01, 0.0, 0.0, 0.0, 1.0, 0.0;
    const Iterate zbar(prob.n, prob.m, prob.p, prob.q, z);

    const Vec r = assemble_residual(prob, zbar, {0.01, 0.02});
    // First complementarity row: sqrt(u1^2 + g1^2 + 2 mu) - u1 + g1 with
    // (u1, g1) = (1, 0) and mu = 0.02, i.e. sqrt(1.04) - 1.
    const int row = prob.n + 2 * prob.m;
    CHECK(r(row) == doctest::Approx(std::sqrt(1.04) - 1.0).epsilon(1e-12));
    // Stationarity rows are untouched by mu.
    const Vec r0 = assemble_residual(prob, zbar, {0.01, 0.0});
    for (int i = 0; i < prob.n + 2 * prob.m; ++i) CHECK(r(i) == doctest::Approx(r0(i)));
}

TEST_CASE("assemble_residual: p = q = 0 reduces to the stationarity rows") {
    BilevelProblem prob;
    prob.name = "unconstrained";
    prob.n = 1;
    prob.m = 1;
    prob.p = 0;
    prob.q = 0;
    prob.eval_F = [](const Vec& x, const Vec& y) { return x(0) * x(0) + y(0) * y(0); };
    prob.eval_f = [](const Vec& x, const Vec& y) {
        return (y(0) - x(0)) * (y(0) - x(0));
    };
    prob.eval_g = [](const Vec&, const Vec&) { return Vec(0); };
    prob.eval_G = [](const Vec&, const Vec&) { return Vec(0); };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        Vec grad(2);
        grad << 2.0 * x(0), 2.0 * y(0);
        return grad;
    };
    prob.grad_f_y = [](const Vec& x, const Vec& y) {
        Vec grad(1);
        grad << 2.0 * (y(0) - x(0));
        return grad;
    };
    prob.jac_g = [](const Vec&, const Vec&) { return Mat(0, 2); };
    prob.jac_G = [](const Vec&, const Vec&) { return Mat(0, 2); };
    prob.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(2, 2)).eval(); };
    prob.hess_g = [](const Vec&, const Vec&) { return std::vector<Mat>{}; };
    prob.hess_G = [](const Vec&, const Vec&) { return std::vector<Mat>{}; };
    prob.hess_f_y_full = [](const Vec&, const Vec&) {
        Mat h(1, 2);
        h << -2.0, 2.0;
        return h;
    };

    Vec z(2);
    z << 3.0, 5.0;
    const Iterate it(1, 1, 0, 0, z);
    const Vec r = assemble_residual(prob, it, {1.0, 0.0});
    REQUIRE(r.size() == 3);
    CHECK(r(0) == doctest::Approx(6.0));   // 2x
    CHECK(r(1) == doctest::Approx(10.0));  // 2y
    CHECK(r(2) == doctest::Approx(4.0));   // 2(y - x)
}

TEST_CASE("assemble_residual rejects mismatched iterate dimensions") {
    const BilevelProblem prob = get_problem("LampariellloSagratella2017Ex33");
    const Iterate wrong(1, 1, 1, 1);
    CHECK_THROWS_AS(assemble_residual(prob, wrong, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("least_squares_value: half squared norm") {
    Vec r1(2);
    r1 << 3.0, 4.0;
    CHECK(least_squares_value(r1) == doctest::Approx(12.5));
    Vec r2(1);
    r2 << 2.0;
    CHECK(least_squares_value(r2) == doctest::Approx(2.0));
    CHECK(least_squares_value(Vec::Zero(5)) == doctest::Approx(0.0));
}

TEST_CASE("smoothing_gap shrinks monotonically to zero with mu") {
    std::mt19937 rng(31);
    for (const auto& name : {"LampariellloSagratella2017Ex33", "Bard1988Ex1", "AllendeStill2013"}) {
        const BilevelProblem prob = get_problem(name);
        const auto [x, y] = random_point_near_start(prob, rng);
        Iterate z = Iterate::for_problem(prob);
        z.x() = x;
        z.y() = y;
        z.u() = Vec::Constant(prob.p, 0.3);
        z.v() = Vec::Constant(prob.q, 0.3);
        z.w() = Vec::Constant(prob.p, 0.3);

        double prev = std::numeric_limits<double>::infinity();
        for (double mu : {1e-1, 1e-2, 1e-3, 1e-5, 1e-8}) {
            const double gap = smoothing_gap(prob, z, 1.0, mu);
            CHECK(gap >= 0.0);
            CHECK(gap <= prev + 1e-15);
            prev = gap;
        }
        CHECK(smoothing_gap(prob, z, 1.0, 1e-12) <= 1e-5);
        CHECK(smoothing_gap(prob, z, 1.0, 0.0) == doctest::Approx(0.0));
    }
}
