#include <doctest.h>

#include <cmath>
#include <numeric>

#include "jhohpm/errors.hpp"
#include "jhohpm/quadrature.hpp"

using namespace jhohpm;

TEST_CASE("gauss-legendre rule on [0, 1]") {
    for (int n : {1, 2, 5, 30, 60}) {
        const Quadrature q = gauss_legendre_01(n);
        CHECK_NOTHROW(q.validate());
        REQUIRE(q.nodes.size() == static_cast<std::size_t>(n));
        CHECK(std::fabs(std::accumulate(q.weights.begin(), q.weights.end(), 0.0) - 1.0) <= 1e-12);
        for (int i = 1; i < n; ++i) CHECK(q.nodes[i] > q.nodes[i - 1]);
        for (int i = 0; i < n; ++i) {
            CHECK(std::fabs(q.nodes[i] + q.nodes[n - 1 - i] - 1.0) <= 1e-14);
            CHECK(std::fabs(q.weights[i] - q.weights[n - 1 - i]) <= 1e-14);
        }
        // exact through degree 2n - 1
        for (int k = 0; k <= std::min(2 * n - 1, 40); ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
            CHECK(std::fabs(s - 1.0 / (k + 1)) <= 1e-13);
        }
    }
    const Quadrature two = gauss_legendre_01(2);
    CHECK(std::fabs(two.nodes[0] - (0.5 - 0.5 / std::sqrt(3.0))) <= 1e-15);
    CHECK(std::fabs(two.weights[0] - 0.5) <= 1e-15);
}

TEST_CASE("uniform collocation") {
    const Quadrature q = uniform_collocation(31);
    CHECK_NOTHROW(q.validate());
    CHECK(q.kind == QuadratureKind::Collocation);
    CHECK(q.nodes.front() == doctest::Approx(0.5 / 31));
    CHECK(q.nodes.back() == doctest::Approx(30.5 / 31));
    for (double w : q.weights) CHECK(w == doctest::Approx(1.0 / 31));
}

TEST_CASE("quadrature validation and names") {
    Quadrature q;
    CHECK_THROWS_AS(q.validate(), Error);
    q.nodes = {0.0};
    q.weights = {1.0};
    CHECK_THROWS_AS(q.validate(), Error);
    q.nodes = {0.5};
    q.weights = {0.9};
    CHECK_THROWS_AS(q.validate(), Error);
    q.weights = {1.0};
    CHECK_NOTHROW(q.validate());
    CHECK_THROWS_AS(gauss_legendre_01(0), Error);
    CHECK_THROWS_AS(uniform_collocation(0), Error);
    CHECK(quadrature_kind_from_string(to_string(QuadratureKind::GaussLegendre)) == QuadratureKind::GaussLegendre);
    CHECK(quadrature_kind_from_string("collocation") == QuadratureKind::Collocation);
    CHECK_THROWS_AS(quadrature_kind_from_string("simpson"), Error);
    CHECK(make_quadrature(QuadratureKind::GaussLegendre, 30).nodes.size() == 30);
}
