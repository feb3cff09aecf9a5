#include "jhohpm/simd/kernels.hpp"

#include <cmath>

namespace jhohpm::simd {
namespace {

inline double horner(const double* c, std::size_t n, double x) {
    if (n == 0) return 0.0;
    double acc = c[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) acc = std::fma(acc, x, c[k]);
    return acc;
}

void laurent_eval(const double* pos, std::size_t npos, const double* neg, std::size_t nneg,
                  const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double v = horner(pos, npos, x[i]);
        if (nneg) {
            const double y = 1.0 / x[i];
            v = std::fma(horner(neg, nneg, y), y, v);
        }
        out[i] = v;
    }
}

void velocity_residual(const double* F, const double* F1, const double* F3, double A, double B,
                       double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(std::fma(A, F[i], B), F1[i], F3[i]);
}

void thermal_residual(const double* T, const double* T2, const double* F, const double* F1,
                      const ThermalCoefficients& k, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double diss = std::fma(k.c0 * F[i], F[i], (k.c1 * F1[i]) * F1[i]);
        out[i] = std::fma(std::fma(k.a1, F[i], k.a0), T[i], T2[i]) + diss;
    }
}

void scaled_product(const double* a, const double* b, double s, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] * b[i]) * s;
}

// Four interleaved partial sums, combined as (l0 + l2) + (l1 + l3), then the tail.
double weighted_sum_squares(const double* w, const double* r, double s, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double v = r[i + l] * s;
            lane[l] = std::fma(w[i + l] * v, v, lane[l]);
        }
    }
    double acc = (lane[0] + lane[2]) + (lane[1] + lane[3]);
    for (std::size_t i = body; i < n; ++i) {
        const double v = r[i] * s;
        acc = std::fma(w[i] * v, v, acc);
    }
    return acc;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable t{"scalar", laurent_eval, velocity_residual, thermal_residual,
                               scaled_product, weighted_sum_squares};
    return t;
}

}  // namespace jhohpm::simd
