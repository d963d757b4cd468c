#pragma once

#include "bilevel_lm/problem.hpp"

#include <random>
#include <vector>

namespace bilevel_lm::testing {

inline Vec random_vec(std::mt19937& rng, int size, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Vec v(size);
    for (int i = 0; i < size; ++i) v(i) = dist(rng);
    return v;
}

/// Random point in a box around the problem's default start.
inline std::pair<Vec, Vec> random_point_near_start(const BilevelProblem& prob, std::mt19937& rng,
                                                   double radius = 1.5) {
    Vec x0 = Vec::Ones(prob.n);
    Vec y0 = Vec::Ones(prob.m);
    if (prob.default_start) {
        x0 = prob.default_start->x;
        y0 = prob.default_start->y;
    }
    return {x0 + random_vec(rng, prob.n, -radius, radius),
            y0 + random_vec(rng, prob.m, -radius, radius)};
}

/// Relative-or-absolute comparison: |a - b| <= max(abs_tol, rel_tol * max(|a|,|b|)).
inline bool close(double a, double b, double rel_tol, double abs_tol) {
    const double diff = std::abs(a - b);
    return diff <= std::max(abs_tol, rel_tol * std::max(std::abs(a), std::abs(b)));
}

/// Central finite differences of a scalar function over the stacked (x, y).
template <typename F>
Vec fd_gradient_xy(const F& f, const Vec& x, const Vec& y, double step = 1e-6) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());
    Vec grad(n + m);
    for (int i = 0; i < n + m; ++i) {
        Vec xp = x, xm = x, yp = y, ym = y;
        if (i < n) {
            xp(i) += step;
            xm(i) -= step;
        } else {
            yp(i - n) += step;
            ym(i - n) -= step;
        }
        grad(i) = (f(xp, yp) - f(xm, ym)) / (2.0 * step);
    }
    return grad;
}

/// Central finite differences of a vector function over the stacked (x, y).
template <typename F>
Mat fd_jacobian_xy(const F& f, const Vec& x, const Vec& y, int rows, double step = 1e-6) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());
    Mat jac(rows, n + m);
    for (int i = 0; i < n + m; ++i) {
        Vec xp = x, xm = x, yp = y, ym = y;
        if (i < n) {
            xp(i) += step;
            xm(i) -= step;
        } else {
            yp(i - n) += step;
            ym(i - n) -= step;
        }
        jac.col(i) = (f(xp, yp) - f(xm, ym)) / (2.0 * step);
    }
    return jac;
}

}  // namespace bilevel_lm::testing
