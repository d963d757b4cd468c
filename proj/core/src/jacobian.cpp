#include "bilevel_lm/jacobian.hpp"

#include <cmath>
#include <stdexcept>

namespace bilevel_lm {

FBDiagonals fb_diagonals(const Vec& mult, const Vec& cons, double mu) {
    if (mult.size() != cons.size()) {
        throw std::invalid_argument("fb_diagonals: multiplier/constraint length mismatch");
    }
    const auto k = mult.size();
    FBDiagonals d{Vec(k), Vec(k)};
    for (Eigen::Index j = 0; j < k; ++j) {
        const double s2 = mult(j) * mult(j) + cons(j) * cons(j) + 2.0 * mu;
        if (s2 == 0.0) {
            throw std::domain_error("fb_diagonals: FB kink at (0, 0) with mu = 0");
        }
        const double s = std::sqrt(s2);
        d.tau(j) = cons(j) / s + 1.0;
        d.gamma(j) = mult(j) / s - 1.0;
    }
    return d;
}

Mat assemble_jacobian(const BilevelProblem& problem, const Iterate& z,
                      const PenaltySmoothingState& state) {
    const int n = problem.n, m = problem.m, p = problem.p, q = problem.q;
    if (z.n() != n || z.m() != m || z.p() != p || z.q() != q) {
        throw std::invalid_argument("assemble_jacobian: iterate dimensions do not match problem '" +
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

    const int nm = n + m;
    Mat J = Mat::Zero(problem.num_residuals(), problem.num_vars());

    // Column offsets of the variable blocks (x,y | u | v | w).
    const int cu = nm, cv = nm + p, cw = nm + p + q;

    // Rows (i)-(ii): Hessian of the penalized upper-level Lagrangian.
    Mat HL = problem.hess_F(x, y);
    if (p > 0) {
        const auto Hg = problem.hess_g(x, y);
        for (int i = 0; i < p; ++i) HL += (u(i) - state.lambda * w(i)) * Hg[i];
    }
    if (q > 0) {
        const auto HG = problem.hess_G(x, y);
        for (int j = 0; j < q; ++j) HL += v(j) * HG[j];
    }
    J.block(0, 0, nm, nm) = HL;
    if (p > 0) {
        J.block(0, cu, nm, p) = Jg.transpose();
        J.block(0, cw, nm, p) = -state.lambda * Jg.transpose();
    }
    if (q > 0) J.block(0, cv, nm, q) = JG.transpose();

    // Rows (iii): derivative of the lower-level stationarity block.
    Mat Hl = problem.hess_f_y_full(x, y);
    if (p > 0) {
        const auto Hg = problem.hess_g(x, y);
        for (int i = 0; i < p; ++i) Hl += w(i) * Hg[i].bottomRows(m);
        J.block(nm, cw, m, p) = Jg.rightCols(m).transpose();
    }
    J.block(nm, 0, m, nm) = Hl;

    // Rows (iv)-(vi): FB derivative diagonals against the constraint Jacobians.
    int off = n + 2 * m;
    if (p > 0) {
        const FBDiagonals du = fb_diagonals(u, g, state.mu);
        J.block(off, 0, p, nm) = du.tau.asDiagonal() * Jg;
        J.block(off, cu, p, p) = Mat(du.gamma.asDiagonal());
    }
    off += p;
    if (q > 0) {
        const FBDiagonals dv = fb_diagonals(v, G, state.mu);
        J.block(off, 0, q, nm) = dv.tau.asDiagonal() * JG;
        J.block(off, cv, q, q) = Mat(dv.gamma.asDiagonal());
    }
    off += q;
    if (p > 0) {
        const FBDiagonals dw = fb_diagonals(w, g, state.mu);
        J.block(off, 0, p, nm) = dw.tau.asDiagonal() * Jg;
        J.block(off, cw, p, p) = Mat(dw.gamma.asDiagonal());
    }

    return J;
}

Mat finite_difference_jacobian(const BilevelProblem& problem, const Iterate& z,
                               const PenaltySmoothingState& state, double step) {
    if (step <= 0.0) throw std::invalid_argument("finite_difference_jacobian: step must be positive");
    const int cols = problem.num_vars();
    Mat J(problem.num_residuals(), cols);
    for (int c = 0; c < cols; ++c) {
        Iterate zp = z;
        Iterate zm = z;
        zp.stacked()(c) += step;
        zm.stacked()(c) -= step;
        J.col(c) = (assemble_residual(problem, zp, state) - assemble_residual(problem, zm, state)) /
                   (2.0 * step);
    }
    return J;
}

int column_rank(const Mat& matrix, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("column_rank: tol must be positive");
    if (matrix.size() == 0) return 0;
    Eigen::FullPivLU<Mat> lu(matrix);
    lu.setThreshold(tol);
    return static_cast<int>(lu.rank());
}

}  // namespace bilevel_lm
