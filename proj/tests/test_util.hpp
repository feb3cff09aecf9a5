#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "jhohpm/laurent_poly.hpp"
#include "jhohpm/oracle.hpp"

namespace testutil {

inline jhohpm::LaurentPoly random_poly(std::mt19937_64& g, int max_degree = 12, int min_exp = 0) {
    std::uniform_int_distribution<int> deg(min_exp, max_degree);
    std::uniform_real_distribution<double> c(-10.0, 10.0);
    std::vector<jhohpm::LaurentPoly::Term> t;
    const int hi = deg(g);
    for (int k = min_exp; k <= hi; ++k)
        if (g() % 3 != 0) t.push_back({k, c(g)});
    return jhohpm::LaurentPoly(t);
}

// Coefficient-wise comparison with relative tolerance on the larger magnitude.
inline bool coeffs_close(const jhohpm::LaurentPoly& a, const jhohpm::LaurentPoly& b, double rel, double abs_floor = 0.0) {
    const int lo = std::min(a.min_exponent(), b.min_exponent());
    const int hi = std::max(a.max_exponent(), b.max_exponent());
    for (int k = lo; k <= hi; ++k) {
        const double x = a.coefficient(k), y = b.coefficient(k);
        if (std::fabs(x - y) > rel * std::max(std::fabs(x), std::fabs(y)) + abs_floor) return false;
    }
    return true;
}

inline bool canonical(const jhohpm::LaurentPoly& p) {
    int prev = jhohpm::LaurentPoly::kMinExponent - 1;
    for (const auto& t : p.terms()) {
        if (t.coefficient == 0.0 || t.exponent <= prev) return false;
        prev = t.exponent;
    }
    return true;
}

// Least-squares fit of an oracle profile in even powers eta^0 .. eta^(2 (terms - 1)).
// Both profiles are even in eta, so this keeps the third derivative well behaved.
inline jhohpm::LaurentPoly fit_even(const jhohpm::OracleSolution& s, int terms = 16) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.eta.size());
    Eigen::MatrixXd V(n, terms);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x2 = s.eta[i] * s.eta[i];
        double p = 1.0;
        for (int k = 0; k < terms; ++k, p *= x2) V(i, k) = p;
        y(i) = s.y[i];
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
    std::vector<jhohpm::LaurentPoly::Term> t;
    for (int k = 0; k < terms; ++k) t.push_back({2 * k, c(k)});
    return jhohpm::LaurentPoly(t);
}

inline double max_abs_on_grid(const jhohpm::LaurentPoly& p, int points = 1001) {
    double m = 0.0;
    for (int i = 0; i < points; ++i) m = std::max(m, std::fabs(p.evaluate(static_cast<double>(i) / (points - 1))));
    return m;
}

// Exact L2 norm on [0, 1] of a pure polynomial.
inline double l2_norm(const jhohpm::LaurentPoly& p) { return std::sqrt((p * p).antiderivative().evaluate(1.0)); }

}  // namespace testutil
