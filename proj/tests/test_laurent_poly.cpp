#include <doctest.h>

#include <random>

#include "jhohpm/errors.hpp"
#include "jhohpm/laurent_poly.hpp"
#include "jhohpm/paper_data.hpp"
#include "test_util.hpp"

using jhohpm::ErrorCode;
using jhohpm::LaurentPoly;
using testutil::canonical;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const jhohpm::Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("add") {
    const LaurentPoly seed{{0, 1.0}, {2, -1.0}};
    CHECK((seed + LaurentPoly{{2, 1.0}, {0, -1.0}}).is_zero());
    CHECK(seed + LaurentPoly() == seed);

    const LaurentPoly p{{5, 2.0}, {4, -10.0}, {2, 8.0}};
    const LaurentPoly s = p + seed;
    CHECK(s == LaurentPoly{{5, 2.0}, {4, -10.0}, {2, 7.0}, {0, 1.0}});
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        const double x = u(g);
        CHECK(s.evaluate(x) == doctest::Approx(p.evaluate(x) + seed.evaluate(x)).epsilon(1e-14));
    }
}

TEST_CASE("mul") {
    CHECK(LaurentPoly{{-1, 1.0}} * LaurentPoly{{2, 1.0}} == LaurentPoly{{1, 1.0}});
    const LaurentPoly seed{{0, 1.0}, {2, -1.0}};
    CHECK(seed * seed == LaurentPoly{{0, 1.0}, {2, -2.0}, {4, 1.0}});
    const LaurentPoly a{{1, -2.0}}, b{{5, 2.0}};
    const LaurentPoly ab = a * b;
    CHECK(ab == LaurentPoly{{6, -4.0}});
    for (double x : {0.3, 0.7}) CHECK(ab.evaluate(x) == doctest::Approx(a.evaluate(x) * b.evaluate(x)).epsilon(1e-15));
}

TEST_CASE("differentiate") {
    CHECK(LaurentPoly{{0, 1.0}, {2, -1.0}}.derivative() == LaurentPoly{{1, -2.0}});
    CHECK(LaurentPoly::constant(3.5).derivative().is_zero());
    const LaurentPoly f1{{5, 2.0}, {4, -10.0}, {2, 8.0}};  // first-order velocity stage with A = B = C1 = 1
    CHECK(f1.derivative() == LaurentPoly{{4, 10.0}, {3, -40.0}, {1, 16.0}});
    CHECK(LaurentPoly{{-1, 1.0}}.derivative() == LaurentPoly{{-2, -1.0}});
}

TEST_CASE("antiderivative") {
    CHECK(LaurentPoly().antiderivative().is_zero());
    // 60 C1 (2A eta^2 - 2(A+B) eta), A = B = C1 = 1, integrated three times
    const LaurentPoly rhs = 60.0 * LaurentPoly{{2, 2.0}, {1, -4.0}};
    CHECK(rhs.antiderivative(3) == LaurentPoly{{5, 2.0}, {4, -10.0}});
    CHECK(code_of([] { LaurentPoly{{-1, 1.0}}.antiderivative(); }) == ErrorCode::NonPolynomialAntiderivative);
    CHECK(LaurentPoly{{-2, 1.0}}.antiderivative() == LaurentPoly{{-1, -1.0}});
}

TEST_CASE("evaluate") {
    const LaurentPoly seed{{0, 1.0}, {2, -1.0}};
    CHECK(seed.evaluate(0.0) == 1.0);
    CHECK(seed.evaluate(1.0) == 0.0);
    const auto& c = jhohpm::bundled_case("5.1");
    REQUIRE(c.paper_solution_f);
    CHECK(c.paper_solution_f->evaluate(0.5) == doctest::Approx(0.5512895302).epsilon(1e-10));
    CHECK(code_of([] { LaurentPoly{{-1, 1.0}, {1, 1.0}}.evaluate(0.0); }) == ErrorCode::EvalAtPole);
    CHECK(LaurentPoly{{-1, 2.0}, {1, 1.0}}.evaluate(0.5) == doctest::Approx(4.5));
    CHECK(LaurentPoly{{-2, 1.0}}.evaluate(0.25) == doctest::Approx(16.0));
}

TEST_CASE("exponent bounds") {
    CHECK(code_of([] { LaurentPoly{{-3, 1.0}}; }) == ErrorCode::ExponentOutOfRange);
    CHECK(code_of([] { LaurentPoly{{LaurentPoly::kMaxExponent + 1, 1.0}}; }) == ErrorCode::ExponentOutOfRange);
    CHECK(code_of([] { LaurentPoly{{-1, 1.0}} * LaurentPoly{{-2, 1.0}}; }) == ErrorCode::ExponentOutOfRange);
}

TEST_CASE("ring laws on random polynomials") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 200; ++i) {
        const LaurentPoly p = testutil::random_poly(g), q = testutil::random_poly(g), r = testutil::random_poly(g);
        CHECK(p + q == q + p);
        CHECK(p * q == q * p);
        CHECK(testutil::coeffs_close((p + q) + r, p + (q + r), 1e-14, 1e-13));
        CHECK(testutil::coeffs_close((p * q) * r, p * (q * r), 1e-12, 1e-9));
        CHECK(testutil::coeffs_close(p * (q + r), p * q + p * r, 1e-12, 1e-9));
        CHECK((p - p).is_zero());
    }
}

TEST_CASE("calculus round trip is exact") {
    std::mt19937_64 g(12);
    for (int i = 0; i < 200; ++i) {
        const LaurentPoly p = testutil::random_poly(g);
        const LaurentPoly back = p.antiderivative().derivative();
        CHECK(back == p);
    }
}

TEST_CASE("evaluation is a ring homomorphism") {
    std::mt19937_64 g(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const LaurentPoly p = testutil::random_poly(g), q = testutil::random_poly(g);
        const double x = u(g);
        const double lhs = (p * q).evaluate(x), rhs = p.evaluate(x) * q.evaluate(x);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::fabs(rhs));
    }
}

TEST_CASE("canonical form is closed under operations") {
    std::mt19937_64 g(14);
    for (int i = 0; i < 200; ++i) {
        const LaurentPoly p = testutil::random_poly(g, 10, -1), q = testutil::random_poly(g, 10, 0);
        CHECK(canonical(p));
        CHECK(canonical(p + q));
        CHECK(canonical(p - p));
        CHECK(canonical(p * q));
        CHECK(canonical(p.derivative()));
        CHECK(canonical(q.antiderivative(2)));
        CHECK(canonical(2.0 * p));
        CHECK(canonical(0.0 * p));
    }
    CHECK(canonical(LaurentPoly{{2, 1.0}, {2, -1.0}, {0, 0.0}}));
    CHECK(LaurentPoly{{2, 1.0}, {2, -1.0}, {0, 0.0}}.is_zero());
}

TEST_CASE("json round trip and layout") {
    const LaurentPoly p{{3, 1.25}, {-1, -2.5}, {0, 0.1}};
    const auto j = p.to_json();
    CHECK(j.at("terms").size() == 3);
    CHECK(j.at("terms")[0][0].get<int>() == -1);
    CHECK(j.at("terms")[2][0].get<int>() == 3);
    CHECK(LaurentPoly::from_json(j) == p);
    CHECK(LaurentPoly::from_json(nlohmann::json::parse(j.dump())) == p);
}

TEST_CASE("batch evaluation matches scalar evaluation") {
    std::mt19937_64 g(15);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int i = 0; i < 20; ++i) {
        const LaurentPoly p = testutil::random_poly(g, 14, -2);
        std::vector<double> x(37);
        for (auto& v : x) v = u(g);
        const auto many = p.evaluate_many(x);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(many[k] == p.evaluate(x[k]));
    }
}
