#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bilevel_lm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Convexity annotation of the lower-level problem with respect to y.
/// Drives how lower-level feasibility of a computed point is assessed.
enum class FeasibilityClass { convex_lower_level, check_by_error };

struct KnownSolution {
    Vec x_star;
    Vec y_star;
    double F_K = 0.0;  // best known upper-level objective value
    double f_K = 0.0;  // known lower-level optimal value
    std::string source;
};

struct StartPoint {
    Vec x;
    Vec y;
};

/// Bilevel problem data:
///   min_{x,y} F(x,y)  s.t.  G(x,y) <= 0,  y in argmin_y { f(x,y) : g(x,y) <= 0 }
///
/// All derivatives are hand-coded and exact; a finite-difference validator in the
/// test suite keeps them honest. Dimensions: x in R^n, y in R^m, g maps to R^p,
/// G maps to R^q. p = 0 and q = 0 are legal; the corresponding evaluators return
/// empty vectors/matrices.
struct BilevelProblem {
    std::string name;
    int n = 0, m = 0, p = 0, q = 0;

    std::function<double(const Vec&, const Vec&)> eval_F;
    std::function<double(const Vec&, const Vec&)> eval_f;
    std::function<Vec(const Vec&, const Vec&)> eval_G;  // size q
    std::function<Vec(const Vec&, const Vec&)> eval_g;  // size p

    std::function<Vec(const Vec&, const Vec&)> grad_F;    // size n+m
    std::function<Vec(const Vec&, const Vec&)> grad_f_y;  // size m
    std::function<Mat(const Vec&, const Vec&)> jac_g;     // p x (n+m)
    std::function<Mat(const Vec&, const Vec&)> jac_G;     // q x (n+m)

    std::function<Mat(const Vec&, const Vec&)> hess_F;                 // (n+m) x (n+m)
    std::function<std::vector<Mat>(const Vec&, const Vec&)> hess_g;    // p matrices, each (n+m)^2
    std::function<std::vector<Mat>(const Vec&, const Vec&)> hess_G;    // q matrices, each (n+m)^2
    std::function<Mat(const Vec&, const Vec&)> hess_f_y_full;          // m x (n+m), derivative of grad_f_y

    std::optional<KnownSolution> known_solution;
    std::optional<StartPoint> default_start;
    std::optional<FeasibilityClass> lower_level_class;

    /// Number of unknowns in the stationarity system: z = (x, y, u, v, w).
    int num_vars() const { return n + m + 2 * p + q; }
    /// Number of residual rows (overdetermined by m).
    int num_residuals() const { return n + 2 * m + 2 * p + q; }
};

/// Stacked variable z = (x, y, u, v, w) with per-block access.
/// u, w in R^p are the lower-level multipliers appearing in the upper and
/// lower stationarity rows respectively; v in R^q the upper-level multipliers.
class Iterate {
  public:
    Iterate(int n, int m, int p, int q)
        : n_(n), m_(m), p_(p), q_(q), z_(Vec::Zero(n + m + 2 * p + q)) {}

    Iterate(int n, int m, int p, int q, Vec stacked)
        : n_(n), m_(m), p_(p), q_(q), z_(std::move(stacked)) {}

    static Iterate for_problem(const BilevelProblem& prob) {
        return Iterate(prob.n, prob.m, prob.p, prob.q);
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int p() const { return p_; }
    int q() const { return q_; }
    int dim() const { return static_cast<int>(z_.size()); }

    const Vec& stacked() const { return z_; }
    Vec& stacked() { return z_; }

    auto x() const { return z_.segment(0, n_); }
    auto y() const { return z_.segment(n_, m_); }
    auto u() const { return z_.segment(n_ + m_, p_); }
    auto v() const { return z_.segment(n_ + m_ + p_, q_); }
    auto w() const { return z_.segment(n_ + m_ + p_ + q_, p_); }

    auto x() { return z_.segment(0, n_); }
    auto y() { return z_.segment(n_, m_); }
    auto u() { return z_.segment(n_ + m_, p_); }
    auto v() { return z_.segment(n_ + m_ + p_, q_); }
    auto w() { return z_.segment(n_ + m_ + p_ + q_, p_); }

  private:
    int n_, m_, p_, q_;
    Vec z_;
};

}  // namespace bilevel_lm
