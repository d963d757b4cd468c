#include "bilevel_lm/residual.hpp"

#include <cmath>
#include <stdexcept>

namespace bilevel_lm {

double fb(double a, double b) {
    return std::sqrt(a * a + b * b) - a - b;
}

double fb_smoothed(double u, double g, double mu) {
    return std::sqrt(u * u + g * g + 2.0 * mu) - u + g;
}

Vec assemble_residual(const BilevelProblem& problem, const Iterate& z,
                      const PenaltySmoothingState& state) {
    const int n = problem.n, m = problem.m, p = problem.p, q = problem.q;
    if (z.n() != n || z.m() != m || z.p() != p || z.q() != q) {
        throw std::invalid_argument("assemble_residual: iterate dimensions do not match problem '" +
                                    problem.name + "'");
    }

    const Vec x = z.x();
    const Vec y = z.y();
    const Vec u = z.u();
    const Vec v = z.v();
    const Vec w = z.w();

    const Vec g = problem.eval_g(x, y);
    const Vec G = problem.eval_G(x, y);
    const Mat Jg = problem.jac_g(x, y);
    const Mat JG = problem.jac_G(x, y);

    Vec r(problem.num_residuals());
    const Vec uw = u - state.lambda * w;

    // Rows (i)-(ii): upper-level stationarity over (x, y).
    Vec stat = problem.grad_F(x, y);
    if (p > 0) stat += Jg.transpose() * uw;
    if (q > 0) stat += JG.transpose() * v;
    r.segment(0, n + m) = stat;

    // Rows (iii): lower-level stationarity in y.
    Vec lstat = problem.grad_f_y(x, y);
    if (p > 0) lstat += Jg.rightCols(m).transpose() * w;
    r.segment(n + m, m) = lstat;

    // Rows (iv)-(vi): complementarity via the (smoothed) FB terms.
    int off = n + 2 * m;
    for (int j = 0; j < p; ++j) r(off + j) = fb_smoothed(u(j), g(j), state.mu);
    off += p;
    for (int j = 0; j < q; ++j) r(off + j) = fb_smoothed(v(j), G(j), state.mu);
    off += q;
    for (int j = 0; j < p; ++j) r(off + j) = fb_smoothed(w(j), g(j), state.mu);

    return r;
}

double least_squares_value(const Vec& residual) {
    return 0.5 * residual.squaredNorm();
}

double smoothing_gap(const BilevelProblem& problem, const Iterate& z, double lambda, double mu) {
    const Vec smoothed = assemble_residual(problem, z, {lambda, mu});
    const Vec exact = assemble_residual(problem, z, {lambda, 0.0});
    return (smoothed - exact).norm();
}

}  // namespace bilevel_lm
