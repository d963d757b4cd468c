#pragma once

#include "bilevel_lm/problem.hpp"

namespace bilevel_lm {

/// Penalty and smoothing parameters of the stationarity system.
/// lambda > 0 is the partial exact penalty weight; mu >= 0 the
/// Fischer-Burmeister smoothing (mu = 0 gives the unsmoothed system).
struct PenaltySmoothingState {
    double lambda = 1.0;
    double mu = 0.0;
};

/// Fischer-Burmeister function sqrt(a^2 + b^2) - a - b.
/// Zero exactly when a >= 0, b >= 0 and a*b = 0.
double fb(double a, double b);

/// Smoothed Fischer-Burmeister term as it appears in the residual:
///   sqrt(u^2 + g^2 + 2*mu) - u + g
/// for a multiplier u paired with a constraint value g <= 0. At mu = 0 this
/// equals fb(u, -g). For mu > 0 the root characterization is
///   value = 0  <=>  u > 0, -g > 0, -u*g = mu.
double fb_smoothed(double u, double g, double mu);

/// Assembles the stacked stationarity residual (smoothed when state.mu > 0):
///   (i)   grad_x F + grad_x g^T (u - lambda*w) + grad_x G^T v        n rows
///   (ii)  grad_y F + grad_y g^T (u - lambda*w) + grad_y G^T v        m rows
///   (iii) grad_y f + grad_y g^T w                                    m rows
///   (iv)  fb_smoothed(u_j, g_j, mu)  componentwise                   p rows
///   (v)   fb_smoothed(v_j, G_j, mu)  componentwise                   q rows
///   (vi)  fb_smoothed(w_j, g_j, mu)  componentwise                   p rows
/// Total length n + 2m + 2p + q. Throws std::invalid_argument when the
/// iterate's dimensions do not match the problem's.
Vec assemble_residual(const BilevelProblem& problem, const Iterate& z,
                      const PenaltySmoothingState& state);

/// Half the squared Euclidean norm of a residual vector.
double least_squares_value(const Vec& residual);

/// || residual(mu) - residual(mu = 0) || at fixed (z, lambda).
/// Monotonically nonincreasing as mu decreases to 0, with limit 0.
double smoothing_gap(const BilevelProblem& problem, const Iterate& z, double lambda, double mu);

}  // namespace bilevel_lm
