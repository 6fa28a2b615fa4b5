#include "reg3d/kernels.hpp"

#include <cstdlib>
#include <string>

namespace reg3d::kernels {
namespace {

const Ops& pick_backend() {
    const char* env = std::getenv("REG3D_KERNELS");
    std::string want = env ? env : "auto";
#if defined(REG3D_HAVE_AVX2_BUILD)
    if (want == "avx2") return avx2_ops();
#endif
#if defined(REG3D_HAVE_NEON_BUILD)
    if (want == "neon") return neon_ops();
#endif
    if (want == "scalar") return scalar_ops();
#if defined(REG3D_HAVE_AVX2_BUILD)
    if (__builtin_cpu_supports("avx2")) return avx2_ops();
#endif
#if defined(REG3D_HAVE_NEON_BUILD)
    return neon_ops();
#endif
    return scalar_ops();
}

}  // namespace

const Ops& active() {
    static const Ops& ops = pick_backend();
    return ops;
}

std::string_view backend_name() { return active().name; }

}  // namespace reg3d::kernels
