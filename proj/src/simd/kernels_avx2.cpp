// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "jhohpm/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace jhohpm::simd {
namespace {

inline __m256d horner4(const double* c, std::size_t n, __m256d x) {
    if (n == 0) return _mm256_setzero_pd();
    __m256d acc = _mm256_set1_pd(c[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(c[k]));
    return acc;
}

void laurent_eval(const double* pos, std::size_t npos, const double* neg, std::size_t nneg,
                  const double* x, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        __m256d v = horner4(pos, npos, xv);
        if (nneg) {
            const __m256d y = _mm256_div_pd(one, xv);
            v = _mm256_fmadd_pd(horner4(neg, nneg, y), y, v);
        }
        _mm256_storeu_pd(out + i, v);
    }
    if (i < n) scalar_kernels().laurent_eval(pos, npos, neg, nneg, x + i, out + i, n - i);
}

void velocity_residual(const double* F, const double* F1, const double* F3, double A, double B,
                       double* out, std::size_t n) {
    const __m256d a = _mm256_set1_pd(A), b = _mm256_set1_pd(B);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_fmadd_pd(a, _mm256_loadu_pd(F + i), b);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(t, _mm256_loadu_pd(F1 + i), _mm256_loadu_pd(F3 + i)));
    }
    if (i < n) scalar_kernels().velocity_residual(F + i, F1 + i, F3 + i, A, B, out + i, n - i);
}

void thermal_residual(const double* T, const double* T2, const double* F, const double* F1,
                      const ThermalCoefficients& k, double* out, std::size_t n) {
    const __m256d a0 = _mm256_set1_pd(k.a0), a1 = _mm256_set1_pd(k.a1);
    const __m256d c0 = _mm256_set1_pd(k.c0), c1 = _mm256_set1_pd(k.c1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d f = _mm256_loadu_pd(F + i);
        const __m256d f1 = _mm256_loadu_pd(F1 + i);
        const __m256d diss = _mm256_fmadd_pd(_mm256_mul_pd(c0, f), f, _mm256_mul_pd(_mm256_mul_pd(c1, f1), f1));
        const __m256d lin =
            _mm256_fmadd_pd(_mm256_fmadd_pd(a1, f, a0), _mm256_loadu_pd(T + i), _mm256_loadu_pd(T2 + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(lin, diss));
    }
    if (i < n) scalar_kernels().thermal_residual(T + i, T2 + i, F + i, F1 + i, k, out + i, n - i);
}

void scaled_product(const double* a, const double* b, double s, double* out, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)), sv));
    if (i < n) scalar_kernels().scaled_product(a + i, b + i, s, out + i, n - i);
}

double weighted_sum_squares(const double* w, const double* r, double s, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n - n % 4;
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(r + i), sv);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), v), v, acc);
    }
    const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double total = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
    for (std::size_t i = body; i < n; ++i) {
        const double v = r[i] * s;
        total = std::fma(w[i] * v, v, total);
    }
    return total;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
    static const KernelTable t{"avx2", laurent_eval, velocity_residual, thermal_residual,
                               scaled_product, weighted_sum_squares};
    return &t;
}

}  // namespace jhohpm::simd

#else

namespace jhohpm::simd {
const KernelTable* avx2_kernels() noexcept { return nullptr; }
}  // namespace jhohpm::simd

#endif
