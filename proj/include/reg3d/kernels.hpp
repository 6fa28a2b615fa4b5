#pragma once

// Data-parallel inner loops used by the geometry and loss modules, with a
// scalar reference and SIMD variants picked once at startup.
//
// Every variant of a kernel produces bit-identical output. Reductions use a
// fixed four-lane scheme so vector and scalar paths round identically:
//
//   acc[j] += a[4k+j] * b[4k+j]      j = 0..3, k = 0..n/4-1
//   tail    = sequential sum of the last n % 4 products
//   result  = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail
//
// No FMA anywhere (the build also sets -ffp-contract=off), so mul-then-add
// rounds the same in scalar code, AVX2, and NEON. Because of this, the
// selected backend never changes a result, only its speed.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace reg3d::kernels {

// Batched pinhole projection parameters: p_cam = r * p + t, then
// u = fx * (x/z) + cx, v = fy * (y/z) + cy.
struct ProjectParams {
    double r[9];       // world-to-camera rotation, row-major
    double t[3];       // world-to-camera translation
    double fx, fy, cx, cy;
    double width, height;  // frustum bounds, continuous pixels
    double near_eps;       // reject camera depths <= near_eps
};

struct Ops {
    // ((acc0+acc1)+(acc2+acc3))+tail dot product.
    double (*dot)(const double* a, const double* b, size_t n);

    // Sum of (a[i]-b[i])^2 over elements where both a[i] and b[i] are
    // finite; same four-lane scheme.
    double (*sum_sq_diff_finite)(const double* a, const double* b, size_t n);

    // dst[i] = a[i] + b[i]
    void (*add)(double* dst, const double* a, const double* b, size_t n);

    // dst[i] += s * x[i]
    void (*axpy)(double* dst, double s, const double* x, size_t n);

    // Projects n points given as SoA arrays. For each point writes
    // (us, vs, zc, valid); invalid points (behind near plane or outside
    // [0,width)x[0,height)) get u = v = z = 0 and valid = 0.
    void (*project)(const ProjectParams& p, const double* xs, const double* ys,
                    const double* zs, size_t n, double* us, double* vs,
                    double* zc, uint8_t* valid);

    const char* name;
};

const Ops& scalar_ops();
#if defined(REG3D_HAVE_AVX2_BUILD)
const Ops& avx2_ops();
#endif
#if defined(REG3D_HAVE_NEON_BUILD)
const Ops& neon_ops();
#endif

// Backend chosen at first use: REG3D_KERNELS=scalar|avx2|neon|auto env
// override, otherwise the widest variant the CPU supports.
const Ops& active();
std::string_view backend_name();

}  // namespace reg3d::kernels
