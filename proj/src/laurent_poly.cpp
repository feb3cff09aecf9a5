#include "jhohpm/laurent_poly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "jhohpm/errors.hpp"
#include "jhohpm/simd/kernels.hpp"

namespace jhohpm {

namespace {

void check_exponent(int e) {
    if (e < LaurentPoly::kMinExponent || e > LaurentPoly::kMaxExponent)
        throw Error(ErrorCode::ExponentOutOfRange, "exponent " + std::to_string(e) + " outside [" +
                                                       std::to_string(LaurentPoly::kMinExponent) + ", " +
                                                       std::to_string(LaurentPoly::kMaxExponent) + "]");
}

}  // namespace

LaurentPoly::LaurentPoly(std::initializer_list<std::pair<int, double>> terms) {
    terms_.reserve(terms.size());
    for (auto [e, c] : terms) terms_.push_back({e, c});
    canonicalize();
}

LaurentPoly::LaurentPoly(std::vector<Term> terms) : terms_(std::move(terms)) { canonicalize(); }

LaurentPoly LaurentPoly::constant(double c) { return LaurentPoly({{0, c}}); }

LaurentPoly LaurentPoly::monomial(int exponent, double c) { return LaurentPoly({{exponent, c}}); }

// Sort, merge equal exponents, drop zeros.
void LaurentPoly::canonicalize() {
    for (const auto& t : terms_) check_exponent(t.exponent);
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!out.empty() && out.back().exponent == t.exponent) {
            out.back().coefficient += t.coefficient;
            out.back().tail += t.tail;
        } else
            out.push_back(t);
    }
    std::erase_if(out, [](const Term& t) { return t.coefficient == 0.0; });
    terms_ = std::move(out);
}

int LaurentPoly::min_exponent() const noexcept { return terms_.empty() ? 0 : terms_.front().exponent; }

int LaurentPoly::max_exponent() const noexcept { return terms_.empty() ? 0 : terms_.back().exponent; }

double LaurentPoly::coefficient(int exponent) const noexcept {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent,
                               [](const Term& t, int e) { return t.exponent < e; });
    return (it != terms_.end() && it->exponent == exponent) ? it->coefficient : 0.0;
}

LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q) {
    std::vector<LaurentPoly::Term> out;
    out.reserve(p.terms_.size() + q.terms_.size());
    auto a = p.terms_.begin(), b = q.terms_.begin();
    while (a != p.terms_.end() || b != q.terms_.end()) {
        if (b == q.terms_.end() || (a != p.terms_.end() && a->exponent < b->exponent)) {
            out.push_back(*a++);
        } else if (a == p.terms_.end() || b->exponent < a->exponent) {
            out.push_back(*b++);
        } else {
            const double c = a->coefficient + b->coefficient;
            if (c != 0.0) out.push_back({a->exponent, c});
            ++a;
            ++b;
        }
    }
    LaurentPoly r;
    r.terms_ = std::move(out);
    return r;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r = *this;
    for (auto& t : r.terms_) {
        t.coefficient = -t.coefficient;
        t.tail = -t.tail;
    }
    return r;
}

LaurentPoly operator-(const LaurentPoly& p, const LaurentPoly& q) { return p + (-q); }

LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
    if (p.is_zero() || q.is_zero()) return {};
    constexpr int span = LaurentPoly::kMaxExponent - LaurentPoly::kMinExponent + 1;
    std::array<double, span> a{}, b{};
    for (const auto& t : p.terms_) a[t.exponent - LaurentPoly::kMinExponent] = t.coefficient;
    for (const auto& t : q.terms_) b[t.exponent - LaurentPoly::kMinExponent] = t.coefficient;
    const int lo = p.min_exponent() + q.min_exponent();
    const int hi = p.max_exponent() + q.max_exponent();
    std::vector<LaurentPoly::Term> out;
    for (int k = lo; k <= hi; ++k) {
        // pair (i, k - i) with (k - i, i) before accumulating so p*q and q*p agree bit for bit
        double acc = 0.0;
        for (int i = LaurentPoly::kMinExponent; 2 * i <= k; ++i) {
            const int j = k - i;
            if (j > LaurentPoly::kMaxExponent) continue;
            const int ii = i - LaurentPoly::kMinExponent, jj = j - LaurentPoly::kMinExponent;
            acc += i == j ? a[ii] * b[jj] : a[ii] * b[jj] + a[jj] * b[ii];
        }
        if (acc != 0.0) out.push_back({k, acc});
    }
    return LaurentPoly(std::move(out));
}

LaurentPoly operator*(double s, const LaurentPoly& p) {
    if (s == 0.0) return {};
    std::vector<LaurentPoly::Term> out = p.terms_;
    for (auto& t : out) {
        t.coefficient *= s;
        t.tail *= s;
    }
    return LaurentPoly(std::move(out));
}

LaurentPoly LaurentPoly::derivative(int order) const {
    LaurentPoly r = *this;
    for (int k = 0; k < order; ++k) {
        std::vector<Term> out;
        out.reserve(r.terms_.size());
        for (const auto& t : r.terms_) {
            if (t.exponent == 0) continue;
            // (coefficient + tail) * n in double-double
            const double n = t.exponent;
            const double prod = t.coefficient * n;
            const double err = std::fma(t.coefficient, n, -prod) + t.tail * n;
            const double head = prod + err;
            out.push_back({t.exponent - 1, head, err - (head - prod)});
        }
        r = LaurentPoly(std::move(out));
    }
    return r;
}

LaurentPoly LaurentPoly::antiderivative(int times) const {
    LaurentPoly r = *this;
    for (int k = 0; k < times; ++k) {
        std::vector<Term> out;
        out.reserve(r.terms_.size());
        for (const auto& t : r.terms_) {
            if (t.exponent == -1)
                throw Error(ErrorCode::NonPolynomialAntiderivative, "antiderivative of eta^-1 is not a Laurent polynomial");
            const double n = t.exponent + 1;
            const double q = t.coefficient / n;
            // remainder of a correctly rounded quotient is exact
            const double rem = std::fma(-q, n, t.coefficient) + t.tail;
            out.push_back({t.exponent + 1, q, rem / n});
        }
        r = LaurentPoly(std::move(out));
    }
    return r;
}

LaurentPoly LaurentPoly::shifted(int k) const {
    std::vector<Term> out = terms_;
    for (auto& t : out) t.exponent += k;
    return LaurentPoly(std::move(out));
}

namespace {

struct SplitCoefficients {
    std::vector<double> pos;  // eta^0 .. eta^max
    std::vector<double> neg;  // eta^-1 .. eta^min
};

SplitCoefficients split(const std::vector<LaurentPoly::Term>& terms) {
    SplitCoefficients s;
    for (const auto& t : terms) {
        if (t.exponent >= 0) {
            if (s.pos.size() <= static_cast<std::size_t>(t.exponent)) s.pos.resize(t.exponent + 1, 0.0);
            s.pos[t.exponent] = t.coefficient;
        } else {
            const std::size_t k = static_cast<std::size_t>(-t.exponent) - 1;
            if (s.neg.size() <= k) s.neg.resize(k + 1, 0.0);
            s.neg[k] = t.coefficient;
        }
    }
    return s;
}

}  // namespace

double LaurentPoly::evaluate(double eta) const {
    double out = 0.0;
    evaluate_many(std::span<const double>(&eta, 1), std::span<double>(&out, 1));
    return out;
}

std::vector<double> LaurentPoly::evaluate_many(std::span<const double> etas) const {
    std::vector<double> out(etas.size());
    evaluate_many(etas, out);
    return out;
}

void LaurentPoly::evaluate_many(std::span<const double> etas, std::span<double> out) const {
    if (out.size() != etas.size()) throw Error(ErrorCode::InvalidSpec, "evaluate_many: size mismatch");
    if (min_exponent() < 0)
        for (double x : etas)
            if (x == 0.0) throw Error(ErrorCode::EvalAtPole, "evaluation at eta = 0 with a negative exponent present");
    const auto s = split(terms_);
    simd::active().laurent_eval(s.pos.data(), s.pos.size(), s.neg.data(), s.neg.size(), etas.data(), out.data(),
                                etas.size());
}

std::vector<double> LaurentPoly::dense() const {
    if (!is_polynomial()) throw Error(ErrorCode::InvalidSpec, "dense(): polynomial has negative exponents");
    return split(terms_).pos;
}

nlohmann::json LaurentPoly::to_pairs() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : terms_) a.push_back({t.exponent, t.coefficient});
    return a;
}

nlohmann::json LaurentPoly::to_json() const { return {{"terms", to_pairs()}}; }

LaurentPoly LaurentPoly::from_pairs(const nlohmann::json& pairs) {
    if (!pairs.is_array()) throw Error(ErrorCode::InvalidSpec, "polynomial terms must be an array of [exponent, coefficient]");
    std::vector<Term> terms;
    for (const auto& p : pairs) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number())
            throw Error(ErrorCode::InvalidSpec, "polynomial term must be [integer exponent, coefficient]");
        terms.push_back({p[0].get<int>(), p[1].get<double>()});
    }
    return LaurentPoly(std::move(terms));
}

LaurentPoly LaurentPoly::from_json(const nlohmann::json& j) {
    if (j.is_object() && j.contains("terms")) return from_pairs(j.at("terms"));
    return from_pairs(j);
}

std::string LaurentPoly::to_string(int precision) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(precision);
    bool first = true;
    for (const auto& t : terms_) {
        double c = t.coefficient;
        if (!first) {
            os << (c < 0 ? " - " : " + ");
            c = std::fabs(c);
        }
        first = false;
        os << c;
        if (t.exponent == 1)
            os << " eta";
        else if (t.exponent != 0)
            os << " eta^" << t.exponent;
    }
    return os.str();
}

LaurentPoly add(const LaurentPoly& p, const LaurentPoly& q) { return p + q; }
LaurentPoly mul(const LaurentPoly& p, const LaurentPoly& q) { return p * q; }
LaurentPoly differentiate(const LaurentPoly& p) { return p.derivative(); }
LaurentPoly antiderivative(const LaurentPoly& p) { return p.antiderivative(); }
double evaluate(const LaurentPoly& p, double eta) { return p.evaluate(eta); }

}  // namespace jhohpm
