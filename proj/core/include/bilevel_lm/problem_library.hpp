#pragma once

#include "bilevel_lm/problem.hpp"

#include <string>
#include <vector>

namespace bilevel_lm {

/// Names of all shipped problems, sorted.
std::vector<std::string> problem_names();

/// Looks up a shipped problem by name. Throws std::out_of_range with a message
/// listing the available names if the name is unknown.
BilevelProblem get_problem(const std::string& name);

/// Affine map x -> M*x + b.
struct AffineMap {
    Mat M;
    Vec b;
    Vec operator()(const Vec& x) const { return M * x + b; }
};

/// Upper-level data for linear_lower_level_problem. G is independent of y:
/// G(x) = G_coeff * x + G_offset (q rows; q = 0 allowed).
struct UpperLevelData {
    std::string name;
    std::function<double(const Vec&, const Vec&)> eval_F;
    std::function<Vec(const Vec&, const Vec&)> grad_F;   // size n+m
    std::function<Mat(const Vec&, const Vec&)> hess_F;   // (n+m)^2
    Mat G_coeff;   // q x n
    Vec G_offset;  // q
    std::optional<KnownSolution> known_solution;
    std::optional<StartPoint> default_start;
};

/// Builds a problem whose lower level is  min_y { c^T y | A(x) + B*y <= d }.
/// This class is partially calm at any local optimum, which makes it the
/// natural source of penalty-study fixtures. All lower-level second
/// derivatives are identically zero. Throws std::invalid_argument on
/// dimension mismatch.
BilevelProblem linear_lower_level_problem(const Vec& c, const Vec& d, const Mat& B,
                                          const AffineMap& A, const UpperLevelData& upper);

}  // namespace bilevel_lm
