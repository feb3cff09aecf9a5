#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace jhohpm {

// Finite Laurent polynomial in eta with integer exponents >= kMinExponent.
// Terms are kept sorted by exponent with no stored zero coefficients.
class LaurentPoly {
public:
    static constexpr int kMinExponent = -2;
    static constexpr int kMaxExponent = 64;

    struct Term {
        int exponent;
        double coefficient;
        // rounding residual left by antiderivative; lets derivative recover the original exactly
        double tail = 0.0;
        bool operator==(const Term& o) const { return exponent == o.exponent && coefficient == o.coefficient; }
    };

    LaurentPoly() = default;
    LaurentPoly(std::initializer_list<std::pair<int, double>> terms);
    explicit LaurentPoly(std::vector<Term> terms);

    static LaurentPoly constant(double c);
    static LaurentPoly monomial(int exponent, double c = 1.0);

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    // 0 for the zero polynomial.
    int min_exponent() const noexcept;
    int max_exponent() const noexcept;
    bool is_polynomial() const noexcept { return min_exponent() >= 0; }
    double coefficient(int exponent) const noexcept;

    friend LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q);
    friend LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q);
    friend LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q);
    friend LaurentPoly operator*(double s, const LaurentPoly& p);
    LaurentPoly operator-() const;

    bool operator==(const LaurentPoly&) const = default;

    LaurentPoly derivative(int order = 1) const;
    // Constant of integration is zero. Throws NonPolynomialAntiderivative on an eta^-1 term.
    LaurentPoly antiderivative(int times = 1) const;
    // Multiply by eta^k.
    LaurentPoly shifted(int k) const;

    // Throws EvalAtPole for eta == 0 with a negative exponent present.
    double evaluate(double eta) const;
    // Batch evaluation, SIMD-dispatched; same pole rule as evaluate.
    std::vector<double> evaluate_many(std::span<const double> etas) const;
    void evaluate_many(std::span<const double> etas, std::span<double> out) const;

    // Dense coefficients c[k] of eta^k, k = 0..max_exponent(); requires is_polynomial().
    std::vector<double> dense() const;

    nlohmann::json to_json() const;
    static LaurentPoly from_json(const nlohmann::json& j);
    static LaurentPoly from_pairs(const nlohmann::json& pairs);
    nlohmann::json to_pairs() const;

    std::string to_string(int precision = 10) const;

private:
    void canonicalize();
    std::vector<Term> terms_;
};

LaurentPoly add(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly mul(const LaurentPoly& p, const LaurentPoly& q);
LaurentPoly differentiate(const LaurentPoly& p);
LaurentPoly antiderivative(const LaurentPoly& p);
double evaluate(const LaurentPoly& p, double eta);

}  // namespace jhohpm
