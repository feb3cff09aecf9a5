#pragma once

#include <cstddef>
#include <string_view>

// Pointwise kernels used at quadrature and grid nodes. Every kernel exists in a
// scalar reference form and an AVX2+FMA form; both use fused multiply-add in the
// same order (and the same 4-lane split for reductions), so results are identical.
namespace jhohpm::simd {

struct ThermalCoefficients {
    double a0;  // 4 alpha^2
    double a1;  // 2 alpha Re Pr
    double c0;  // beta Pr (H + 4 alpha^2)
    double c1;  // beta Pr
};

struct KernelTable {
    std::string_view name;
    // out[i] = sum_k pos[k] x^k + sum_{k>=1} neg[k-1] x^-k
    void (*laurent_eval)(const double* pos, std::size_t npos, const double* neg, std::size_t nneg,
                         const double* x, double* out, std::size_t n);
    // out[i] = F3 + (A F + B) F1
    void (*velocity_residual)(const double* F, const double* F1, const double* F3, double A, double B,
                              double* out, std::size_t n);
    // out[i] = T2 + (a0 + a1 F) T + (c0 F^2 + c1 F1^2)
    void (*thermal_residual)(const double* T, const double* T2, const double* F, const double* F1,
                             const ThermalCoefficients& k, double* out, std::size_t n);
    // out[i] = a[i] * b[i] * s
    void (*scaled_product)(const double* a, const double* b, double s, double* out, std::size_t n);
    // sum_i w[i] (r[i] s)^2
    double (*weighted_sum_squares)(const double* w, const double* r, double s, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
// Null when the AVX2 translation unit was not built.
const KernelTable* avx2_kernels() noexcept;
bool cpu_has_avx2_fma() noexcept;

// AVX2 when the CPU supports it, unless JHOHPM_SIMD=scalar is set.
const KernelTable& active() noexcept;

}  // namespace jhohpm::simd
