#include <cstdlib>
#include <string_view>

#include "jhohpm/simd/kernels.hpp"

namespace jhohpm::simd {

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& active() noexcept {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("JHOHPM_SIMD");
        const bool force_scalar = env && std::string_view(env) == "scalar";
        const KernelTable* v = avx2_kernels();
        if (!force_scalar && v && cpu_has_avx2_fma()) return v;
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace jhohpm::simd
