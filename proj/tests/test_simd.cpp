#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "jhohpm/simd/kernels.hpp"

using namespace jhohpm::simd;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> draw(std::mt19937_64& g, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

}  // namespace

TEST_CASE("dispatch picks a usable table") {
    const KernelTable& k = active();
    CHECK(k.laurent_eval != nullptr);
    if (!cpu_has_avx2_fma()) CHECK(k.name == scalar_kernels().name);
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
    const KernelTable* v = avx2_kernels();
    if (!v || !cpu_has_avx2_fma()) {
        MESSAGE("AVX2+FMA not available; equivalence not exercised");
        return;
    }
    const KernelTable& s = scalar_kernels();
    std::mt19937_64 g(21);
    // sizes around the 4-lane boundary, including the tail paths
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 30u, 31u, 101u, 1000u}) {
        const auto x = draw(g, n, 0.01, 1.0);
        for (std::size_t npos : {0u, 1u, 5u, 13u}) {
            for (std::size_t nneg : {0u, 1u, 2u}) {
                const auto pos = draw(g, npos, -10, 10), neg = draw(g, nneg, -10, 10);
                std::vector<double> a(n), b(n);
                s.laurent_eval(pos.data(), npos, neg.data(), nneg, x.data(), a.data(), n);
                v->laurent_eval(pos.data(), npos, neg.data(), nneg, x.data(), b.data(), n);
                CHECK(bit_equal(a, b));
            }
        }
        const auto F = draw(g, n, -1, 1), F1 = draw(g, n, -3, 3), F3 = draw(g, n, -50, 50);
        const auto T = draw(g, n, -1e-11, 1e-11), T2 = draw(g, n, -1e-10, 1e-10);
        std::vector<double> a(n), b(n);
        s.velocity_residual(F.data(), F1.data(), F3.data(), 13.09, -4.2, a.data(), n);
        v->velocity_residual(F.data(), F1.data(), F3.data(), 13.09, -4.2, b.data(), n);
        CHECK(bit_equal(a, b));
        const ThermalCoefficients tc{0.068, 13.09, 3.5e-13 * 250.07, 3.5e-13};
        s.thermal_residual(T.data(), T2.data(), F.data(), F1.data(), tc, a.data(), n);
        v->thermal_residual(T.data(), T2.data(), F.data(), F1.data(), tc, b.data(), n);
        CHECK(bit_equal(a, b));
        s.scaled_product(F.data(), F1.data(), 0.37, a.data(), n);
        v->scaled_product(F.data(), F1.data(), 0.37, b.data(), n);
        CHECK(bit_equal(a, b));
        const auto w = draw(g, n, 0, 1);
        const double ws = s.weighted_sum_squares(w.data(), F3.data(), 1e-3, n);
        const double wv = v->weighted_sum_squares(w.data(), F3.data(), 1e-3, n);
        CHECK(std::memcmp(&ws, &wv, sizeof ws) == 0);
    }
}

TEST_CASE("scalar kernels compute the documented formulas") {
    const KernelTable& s = scalar_kernels();
    const double pos[] = {1.0, 0.0, -1.0}, neg[] = {2.0};
    const double x[] = {0.5, 0.25};
    double out[2];
    s.laurent_eval(pos, 3, neg, 1, x, out, 2);
    CHECK(out[0] == doctest::Approx(1 - 0.25 + 4));
    CHECK(out[1] == doctest::Approx(1 - 0.0625 + 8));

    const double F[] = {0.5}, F1[] = {-1.0}, F3[] = {2.0};
    s.velocity_residual(F, F1, F3, 3.0, 0.5, out, 1);
    CHECK(out[0] == doctest::Approx(2.0 + (3.0 * 0.5 + 0.5) * -1.0));

    const double T[] = {0.1}, T2[] = {0.2};
    const ThermalCoefficients k{0.3, 0.4, 0.5, 0.6};
    s.thermal_residual(T, T2, F, F1, k, out, 1);
    CHECK(out[0] == doctest::Approx(0.2 + (0.3 + 0.4 * 0.5) * 0.1 + 0.5 * 0.25 + 0.6 * 1.0));

    const double w[] = {0.5, 0.25, 0.25, 1.0, 2.0}, r[] = {1, 2, 3, 4, 5};
    CHECK(s.weighted_sum_squares(w, r, 2.0, 5) == doctest::Approx(4 * (0.5 + 1 + 2.25 + 16 + 50)));
}
