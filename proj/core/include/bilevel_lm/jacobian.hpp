#pragma once

#include "bilevel_lm/problem.hpp"
#include "bilevel_lm/residual.hpp"

namespace bilevel_lm {

/// Diagonals of the derivative of the smoothed FB term for a
/// multiplier/constraint pairing: with s_j = sqrt(mult_j^2 + cons_j^2 + 2*mu),
///   tau_j   = cons_j / s_j + 1   (partial derivative w.r.t. the constraint)
///   gamma_j = mult_j / s_j - 1   (partial derivative w.r.t. the multiplier)
/// For mu > 0 these are strictly inside (0, 2) and (-2, 0).
struct FBDiagonals {
    Vec tau;
    Vec gamma;
};

/// Throws std::domain_error when mu = 0 and some pair (mult_j, cons_j) = (0, 0),
/// the kink of the unsmoothed FB function.
FBDiagonals fb_diagonals(const Vec& mult, const Vec& cons, double mu);

/// Analytic Jacobian of assemble_residual with respect to z = (x, y, u, v, w);
/// shape (n+2m+2p+q) x (n+m+2p+q). Row blocks follow the residual layout:
///
///   [ H_L            grad g^T   grad G^T   -lambda*grad g^T ]   n+m rows
///   [ H_l            0          0          grad_y g^T       ]   m rows
///   [ T*grad g       Gamma      0          0                ]   p rows
///   [ A*grad G       0          B          0                ]   q rows
///   [ Theta*grad g   0          0          K                ]   p rows
///
/// with H_L = hess_F + sum_i (u_i - lambda*w_i) hess_g_i + sum_j v_j hess_G_j,
/// H_l = hess_f_y_full + sum_i w_i * (y-rows of hess_g_i), and the diagonal
/// pairs (T, Gamma), (A, B), (Theta, K) from fb_diagonals over (u, g), (v, G)
/// and (w, g).
Mat assemble_jacobian(const BilevelProblem& problem, const Iterate& z,
                      const PenaltySmoothingState& state);

/// Central-difference approximation of the residual Jacobian, column by column.
Mat finite_difference_jacobian(const BilevelProblem& problem, const Iterate& z,
                               const PenaltySmoothingState& state, double step);

/// Numerical column rank via a fully pivoted LU factorization; pivots below
/// tol times the largest pivot magnitude count as zero.
int column_rank(const Mat& matrix, double tol = 1e-8);

}  // namespace bilevel_lm
