#include "bilevel_lm/problem_library.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace bilevel_lm {

namespace {

Vec vec(std::initializer_list<double> vals) {
    Vec v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v(i++) = x;
    return v;
}

// Constant-returning evaluators for empty / affine blocks.
auto empty_vec_eval() {
    return [](const Vec&, const Vec&) { return Vec(0); };
}
auto empty_mat_eval(int rows, int cols) {
    return [rows, cols](const Vec&, const Vec&) { return Mat::Zero(rows, cols).eval(); };
}
auto zero_hessians(int count, int nm) {
    return [count, nm](const Vec&, const Vec&) {
        return std::vector<Mat>(count, Mat::Zero(nm, nm));
    };
}

BilevelProblem make_lampariello_sagratella_ex33() {
    BilevelProblem prob;
    prob.name = "LampariellloSagratella2017Ex33";
    prob.n = 1;
    prob.m = 2;
    prob.p = 3;
    prob.q = 1;

    prob.eval_F = [](const Vec& x, const Vec& y) {
        const double s = y(0) + y(1);
        return x(0) * x(0) + s * s;
    };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        const double s = y(0) + y(1);
        return vec({2.0 * x(0), 2.0 * s, 2.0 * s});
    };
    prob.hess_F = [](const Vec&, const Vec&) {
        Mat H = Mat::Zero(3, 3);
        H(0, 0) = 2.0;
        H(1, 1) = H(1, 2) = H(2, 1) = H(2, 2) = 2.0;
        return H;
    };

    prob.eval_G = [](const Vec& x, const Vec&) { return vec({-x(0) + 0.5}); };
    prob.jac_G = [](const Vec&, const Vec&) {
        Mat J(1, 3);
        J << -1, 0, 0;
        return J;
    };
    prob.hess_G = zero_hessians(1, 3);

    prob.eval_f = [](const Vec&, const Vec& y) { return y(0); };
    prob.grad_f_y = [](const Vec&, const Vec&) { return vec({1.0, 0.0}); };
    prob.hess_f_y_full = empty_mat_eval(2, 3);

    prob.eval_g = [](const Vec& x, const Vec& y) {
        return vec({-x(0) - y(0) - y(1) + 1.0, -y(0), -y(1)});
    };
    prob.jac_g = [](const Vec&, const Vec&) {
        Mat J(3, 3);
        J << -1, -1, -1, 0, -1, 0, 0, 0, -1;
        return J;
    };
    prob.hess_g = zero_hessians(3, 3);

    prob.known_solution =
        KnownSolution{vec({0.5}), vec({0.0, 0.5}), 0.5, 0.0, "Lampariello & Sagratella (2017), Example 3.3"};
    prob.lower_level_class = FeasibilityClass::convex_lower_level;
    return prob;
}

BilevelProblem make_allende_still_2013() {
    BilevelProblem prob;
    prob.name = "AllendeStill2013";
    prob.n = 2;
    prob.m = 2;
    prob.p = 2;
    prob.q = 5;

    prob.eval_F = [](const Vec& x, const Vec& y) {
        return x(0) * x(0) - 2.0 * x(0) + x(1) * x(1) - 2.0 * x(1) + y(0) * y(0) + y(1) * y(1);
    };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * x(0) - 2.0, 2.0 * x(1) - 2.0, 2.0 * y(0), 2.0 * y(1)});
    };
    prob.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(4, 4)).eval(); };

    prob.eval_G = [](const Vec& x, const Vec& y) {
        return vec({-x(0), -x(1), -y(0), -y(1), x(0) - 2.0});
    };
    prob.jac_G = [](const Vec&, const Vec&) {
        Mat J(5, 4);
        J << -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0;
        return J;
    };
    prob.hess_G = zero_hessians(5, 4);

    prob.eval_f = [](const Vec& x, const Vec& y) {
        return y(0) * y(0) - 2.0 * x(0) * y(0) + y(1) * y(1) - 2.0 * x(1) * y(1);
    };
    prob.grad_f_y = [](const Vec& x, const Vec& y) {
        return vec({2.0 * y(0) - 2.0 * x(0), 2.0 * y(1) - 2.0 * x(1)});
    };
    prob.hess_f_y_full = [](const Vec&, const Vec&) {
        Mat H(2, 4);
        H << -2, 0, 2, 0, 0, -2, 0, 2;
        return H;
    };

    prob.eval_g = [](const Vec&, const Vec& y) {
        return vec({(y(0) - 1.0) * (y(0) - 1.0) - 0.25, (y(1) - 1.0) * (y(1) - 1.0) - 0.25});
    };
    prob.jac_g = [](const Vec&, const Vec& y) {
        Mat J = Mat::Zero(2, 4);
        J(0, 2) = 2.0 * (y(0) - 1.0);
        J(1, 3) = 2.0 * (y(1) - 1.0);
        return J;
    };
    prob.hess_g = [](const Vec&, const Vec&) {
        std::vector<Mat> H(2, Mat::Zero(4, 4));
        H[0](2, 2) = 2.0;
        H[1](3, 3) = 2.0;
        return H;
    };

    prob.known_solution =
        KnownSolution{vec({0.5, 0.5}), vec({0.5, 0.5}), -1.0, -0.5, "Allende & Still (2013)"};
    prob.lower_level_class = FeasibilityClass::convex_lower_level;
    return prob;
}

BilevelProblem make_bard_1988_ex1() {
    BilevelProblem prob;
    prob.name = "Bard1988Ex1";
    prob.n = 1;
    prob.m = 1;
    prob.p = 4;
    prob.q = 1;

    prob.eval_F = [](const Vec& x, const Vec& y) {
        const double a = x(0) - 5.0, b = 2.0 * y(0) + 1.0;
        return a * a + b * b;
    };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * (x(0) - 5.0), 4.0 * (2.0 * y(0) + 1.0)});
    };
    prob.hess_F = [](const Vec&, const Vec&) {
        Mat H(2, 2);
        H << 2, 0, 0, 8;
        return H;
    };

    prob.eval_G = [](const Vec& x, const Vec&) { return vec({-x(0)}); };
    prob.jac_G = [](const Vec&, const Vec&) {
        Mat J(1, 2);
        J << -1, 0;
        return J;
    };
    prob.hess_G = zero_hessians(1, 2);

    prob.eval_f = [](const Vec& x, const Vec& y) {
        const double a = y(0) - 1.0;
        return a * a - 1.5 * x(0) * y(0);
    };
    prob.grad_f_y = [](const Vec& x, const Vec& y) {
        return vec({2.0 * (y(0) - 1.0) - 1.5 * x(0)});
    };
    prob.hess_f_y_full = [](const Vec&, const Vec&) {
        Mat H(1, 2);
        H << -1.5, 2.0;
        return H;
    };

    prob.eval_g = [](const Vec& x, const Vec& y) {
        return vec({-3.0 * x(0) + y(0) + 3.0, x(0) - 0.5 * y(0) - 4.0, x(0) + y(0) - 7.0, -y(0)});
    };
    prob.jac_g = [](const Vec&, const Vec&) {
        Mat J(4, 2);
        J << -3, 1, 1, -0.5, 1, 1, 0, -1;
        return J;
    };
    prob.hess_g = zero_hessians(4, 2);

    prob.known_solution = KnownSolution{vec({1.0}), vec({0.0}), 17.0, 1.0, "Bard (1988)"};
    // Default (1,1) violates -3x + y + 3 <= 0; start on that constraint's boundary.
    prob.default_start = StartPoint{vec({1.0}), vec({0.0})};
    prob.lower_level_class = FeasibilityClass::convex_lower_level;
    return prob;
}

BilevelProblem make_shimizu_aiyoshi_1981_ex1() {
    BilevelProblem prob;
    prob.name = "ShimizuAiyoshi1981Ex1";
    prob.n = 1;
    prob.m = 1;
    prob.p = 3;
    prob.q = 3;

    prob.eval_F = [](const Vec& x, const Vec& y) {
        const double a = y(0) - 10.0;
        return x(0) * x(0) + a * a;
    };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * x(0), 2.0 * (y(0) - 10.0)});
    };
    prob.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(2, 2)).eval(); };

    prob.eval_G = [](const Vec& x, const Vec& y) {
        return vec({-x(0) + y(0), -x(0), x(0) - 15.0});
    };
    prob.jac_G = [](const Vec&, const Vec&) {
        Mat J(3, 2);
        J << -1, 1, -1, 0, 1, 0;
        return J;
    };
    prob.hess_G = zero_hessians(3, 2);

    prob.eval_f = [](const Vec& x, const Vec& y) {
        const double a = x(0) + 2.0 * y(0) - 30.0;
        return a * a;
    };
    prob.grad_f_y = [](const Vec& x, const Vec& y) {
        return vec({4.0 * (x(0) + 2.0 * y(0) - 30.0)});
    };
    prob.hess_f_y_full = [](const Vec&, const Vec&) {
        Mat H(1, 2);
        H << 4.0, 8.0;
        return H;
    };

    prob.eval_g = [](const Vec& x, const Vec& y) {
        return vec({x(0) + y(0) - 20.0, -y(0), y(0) - 20.0});
    };
    prob.jac_g = [](const Vec&, const Vec&) {
        Mat J(3, 2);
        J << 1, 1, 0, -1, 0, 1;
        return J;
    };
    prob.hess_g = zero_hessians(3, 2);

    prob.known_solution =
        KnownSolution{vec({10.0}), vec({10.0}), 100.0, 0.0, "Shimizu & Aiyoshi (1981), Example 1"};
    prob.lower_level_class = FeasibilityClass::convex_lower_level;
    return prob;
}

BilevelProblem make_nonconvex_lower_quadratic() {
    BilevelProblem prob;
    prob.name = "NonconvexLowerQuadratic";
    prob.n = 1;
    prob.m = 1;
    prob.p = 1;
    prob.q = 0;

    prob.eval_F = [](const Vec& x, const Vec& y) {
        const double a = y(0) - 1.0;
        return x(0) * x(0) + a * a;
    };
    prob.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * x(0), 2.0 * (y(0) - 1.0)});
    };
    prob.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(2, 2)).eval(); };

    prob.eval_G = empty_vec_eval();
    prob.jac_G = empty_mat_eval(0, 2);
    prob.hess_G = zero_hessians(0, 2);

    // Lower level min -y^2 s.t. y^2 <= 1: concave objective, optima at y = +-1;
    // the optimistic choice is y = 1.
    prob.eval_f = [](const Vec&, const Vec& y) { return -y(0) * y(0); };
    prob.grad_f_y = [](const Vec&, const Vec& y) { return vec({-2.0 * y(0)}); };
    prob.hess_f_y_full = [](const Vec&, const Vec&) {
        Mat H(1, 2);
        H << 0.0, -2.0;
        return H;
    };

    prob.eval_g = [](const Vec&, const Vec& y) { return vec({y(0) * y(0) - 1.0}); };
    prob.jac_g = [](const Vec&, const Vec& y) {
        Mat J(1, 2);
        J << 0.0, 2.0 * y(0);
        return J;
    };
    prob.hess_g = [](const Vec&, const Vec&) {
        std::vector<Mat> H(1, Mat::Zero(2, 2));
        H[0](1, 1) = 2.0;
        return H;
    };

    prob.known_solution =
        KnownSolution{vec({0.0}), vec({1.0}), 0.0, -1.0, "constructed; analytic solution"};
    prob.lower_level_class = FeasibilityClass::check_by_error;
    return prob;
}

BilevelProblem make_calm_linear_1() {
    // Lower level: min_y { y | x - y <= 0 }  =>  y*(x) = x.
    AffineMap A{Mat::Constant(1, 1, 1.0), Vec::Zero(1)};
    UpperLevelData upper;
    upper.name = "CalmLinear1";
    upper.eval_F = [](const Vec& x, const Vec& y) {
        const double a = x(0) - 1.0, b = y(0) - 1.0;
        return a * a + b * b;
    };
    upper.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * (x(0) - 1.0), 2.0 * (y(0) - 1.0)});
    };
    upper.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(2, 2)).eval(); };
    upper.G_coeff = Mat(0, 1);
    upper.G_offset = Vec(0);
    upper.known_solution =
        KnownSolution{vec({1.0}), vec({1.0}), 0.0, 1.0, "constructed; analytic solution"};
    return linear_lower_level_problem(vec({1.0}), Vec::Zero(1), Mat::Constant(1, 1, -1.0), A, upper);
}

BilevelProblem make_calm_linear_2() {
    // Lower level: min_y { y1 + y2 | -x - y_i <= 0 }  =>  y*(x) = (-x, -x).
    Mat AM(2, 1);
    AM << -1.0, -1.0;
    AffineMap A{AM, Vec::Zero(2)};
    UpperLevelData upper;
    upper.name = "CalmLinear2";
    upper.eval_F = [](const Vec& x, const Vec& y) {
        const double a = y(0) - 2.0, b = y(1) + 1.0;
        return x(0) * x(0) + a * a + b * b;
    };
    upper.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * x(0), 2.0 * (y(0) - 2.0), 2.0 * (y(1) + 1.0)});
    };
    upper.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(3, 3)).eval(); };
    upper.G_coeff = Mat(0, 1);
    upper.G_offset = Vec(0);
    upper.known_solution = KnownSolution{vec({-1.0 / 3.0}), vec({1.0 / 3.0, 1.0 / 3.0}),
                                         14.0 / 3.0, 2.0 / 3.0, "constructed; analytic solution"};
    return linear_lower_level_problem(vec({1.0, 1.0}), Vec::Zero(2),
                                      (-Mat::Identity(2, 2)).eval(), A, upper);
}

BilevelProblem make_calm_linear_3() {
    // Lower level: min_y { -y | y <= x, y <= 2 - x }  =>  y*(x) = min(x, 2 - x).
    Mat AM(2, 1);
    AM << -1.0, 1.0;
    Vec Ab(2);
    Ab << 0.0, -2.0;
    AffineMap A{AM, Ab};
    Mat B(2, 1);
    B << 1.0, 1.0;
    UpperLevelData upper;
    upper.name = "CalmLinear3";
    upper.eval_F = [](const Vec& x, const Vec& y) {
        const double a = x(0) - 0.5, b = y(0) - 1.0;
        return a * a + b * b;
    };
    upper.grad_F = [](const Vec& x, const Vec& y) {
        return vec({2.0 * (x(0) - 0.5), 2.0 * (y(0) - 1.0)});
    };
    upper.hess_F = [](const Vec&, const Vec&) { return (2.0 * Mat::Identity(2, 2)).eval(); };
    upper.G_coeff = Mat::Constant(1, 1, -1.0);
    upper.G_offset = Vec::Zero(1);
    upper.known_solution =
        KnownSolution{vec({0.75}), vec({0.75}), 0.125, -0.75, "constructed; analytic solution"};
    return linear_lower_level_problem(vec({-1.0}), Vec::Zero(2), B, A, upper);
}

using Factory = BilevelProblem (*)();

const std::map<std::string, Factory>& registry() {
    static const std::map<std::string, Factory> reg = {
        {"LampariellloSagratella2017Ex33", &make_lampariello_sagratella_ex33},
        {"AllendeStill2013", &make_allende_still_2013},
        {"Bard1988Ex1", &make_bard_1988_ex1},
        {"ShimizuAiyoshi1981Ex1", &make_shimizu_aiyoshi_1981_ex1},
        {"NonconvexLowerQuadratic", &make_nonconvex_lower_quadratic},
        {"CalmLinear1", &make_calm_linear_1},
        {"CalmLinear2", &make_calm_linear_2},
        {"CalmLinear3", &make_calm_linear_3},
    };
    return reg;
}

}  // namespace

std::vector<std::string> problem_names() {
    std::vector<std::string> names;
    names.reserve(registry().size());
    for (const auto& [name, _] : registry()) names.push_back(name);
    return names;
}

BilevelProblem get_problem(const std::string& name) {
    const auto& reg = registry();
    const auto it = reg.find(name);
    if (it == reg.end()) {
        std::ostringstream msg;
        msg << "unknown problem '" << name << "'; available:";
        for (const auto& [known, _] : reg) msg << ' ' << known;
        throw std::out_of_range(msg.str());
    }
    return it->second();
}

BilevelProblem linear_lower_level_problem(const Vec& c, const Vec& d, const Mat& B,
                                          const AffineMap& A, const UpperLevelData& upper) {
    const int n = static_cast<int>(A.M.cols());
    const int m = static_cast<int>(c.size());
    const int p = static_cast<int>(d.size());
    const int q = static_cast<int>(upper.G_offset.size());
    if (B.rows() != p || B.cols() != m || A.M.rows() != p || A.b.size() != p) {
        throw std::invalid_argument("linear_lower_level_problem: inconsistent lower-level dimensions");
    }
    if (upper.G_coeff.rows() != q || (q > 0 && upper.G_coeff.cols() != n)) {
        throw std::invalid_argument("linear_lower_level_problem: inconsistent upper-level dimensions");
    }

    BilevelProblem prob;
    prob.name = upper.name;
    prob.n = n;
    prob.m = m;
    prob.p = p;
    prob.q = q;

    prob.eval_F = upper.eval_F;
    prob.grad_F = upper.grad_F;
    prob.hess_F = upper.hess_F;

    const Mat Gc = upper.G_coeff;
    const Vec Go = upper.G_offset;
    prob.eval_G = [Gc, Go](const Vec& x, const Vec&) { return (Gc * x + Go).eval(); };
    Mat JG = Mat::Zero(q, n + m);
    JG.leftCols(n) = Gc;
    prob.jac_G = [JG](const Vec&, const Vec&) { return JG; };
    prob.hess_G = zero_hessians(q, n + m);

    prob.eval_f = [c](const Vec&, const Vec& y) { return c.dot(y); };
    prob.grad_f_y = [c](const Vec&, const Vec&) { return c; };
    prob.hess_f_y_full = empty_mat_eval(m, n + m);

    prob.eval_g = [A, B, d](const Vec& x, const Vec& y) { return (A(x) + B * y - d).eval(); };
    Mat Jg(p, n + m);
    Jg.leftCols(n) = A.M;
    Jg.rightCols(m) = B;
    prob.jac_g = [Jg](const Vec&, const Vec&) { return Jg; };
    prob.hess_g = zero_hessians(p, n + m);

    prob.known_solution = upper.known_solution;
    prob.default_start = upper.default_start;
    prob.lower_level_class = FeasibilityClass::convex_lower_level;
    return prob;
}

}  // namespace bilevel_lm
