#include "reg3d/kernels.hpp"

#include <arm_neon.h>
#include <cmath>
#include <limits>

// NEON (aarch64) variants. Two float64x2 registers stand in for the four
// scalar accumulator lanes: {acc0, acc1} and {acc2, acc3}.

namespace reg3d::kernels {
namespace {

inline double reduce4(float64x2_t acc01, float64x2_t acc23, double tail) {
    double l0 = vgetq_lane_f64(acc01, 0), l1 = vgetq_lane_f64(acc01, 1);
    double l2 = vgetq_lane_f64(acc23, 0), l3 = vgetq_lane_f64(acc23, 1);
    return ((l0 + l1) + (l2 + l3)) + tail;
}

double dot_neon(const double* a, const double* b, size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23,
                          vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) tail = tail + a[i] * b[i];
    return reduce4(acc01, acc23, tail);
}

inline uint64x2_t finite_mask(float64x2_t v) {
    float64x2_t inf = vdupq_n_f64(std::numeric_limits<double>::infinity());
    return vcltq_f64(vabsq_f64(v), inf);
}

inline float64x2_t masked_sq_diff(float64x2_t a, float64x2_t b) {
    float64x2_t d = vsubq_f64(a, b);
    float64x2_t sq = vmulq_f64(d, d);
    uint64x2_t ok = vandq_u64(finite_mask(a), finite_mask(b));
    return vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(sq), ok));
}

double sum_sq_diff_finite_neon(const double* a, const double* b, size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, masked_sq_diff(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23,
                          masked_sq_diff(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) {
        double d = a[i] - b[i];
        tail = tail + (std::isfinite(a[i]) && std::isfinite(b[i]) ? d * d : 0.0);
    }
    return reduce4(acc01, acc23, tail);
}

void add_neon(double* dst, const double* a, const double* b, size_t n) {
    size_t n2 = n & ~size_t(1);
    for (size_t i = 0; i < n2; i += 2) {
        vst1q_f64(dst + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    for (size_t i = n2; i < n; ++i) dst[i] = a[i] + b[i];
}

void axpy_neon(double* dst, double s, const double* x, size_t n) {
    float64x2_t vs = vdupq_n_f64(s);
    size_t n2 = n & ~size_t(1);
    for (size_t i = 0; i < n2; i += 2) {
        vst1q_f64(dst + i,
                  vaddq_f64(vld1q_f64(dst + i), vmulq_f64(vs, vld1q_f64(x + i))));
    }
    for (size_t i = n2; i < n; ++i) dst[i] = dst[i] + s * x[i];
}

void project_neon(const ProjectParams& p, const double* xs, const double* ys,
                  const double* zs, size_t n, double* us, double* vs,
                  double* zc, uint8_t* valid) {
    size_t n2 = n & ~size_t(1);
    for (size_t i = 0; i < n2; i += 2) {
        float64x2_t X = vld1q_f64(xs + i);
        float64x2_t Y = vld1q_f64(ys + i);
        float64x2_t Z = vld1q_f64(zs + i);
        float64x2_t x = vaddq_f64(
            vaddq_f64(vaddq_f64(vmulq_f64(vdupq_n_f64(p.r[0]), X),
                                vmulq_f64(vdupq_n_f64(p.r[1]), Y)),
                      vmulq_f64(vdupq_n_f64(p.r[2]), Z)),
            vdupq_n_f64(p.t[0]));
        float64x2_t y = vaddq_f64(
            vaddq_f64(vaddq_f64(vmulq_f64(vdupq_n_f64(p.r[3]), X),
                                vmulq_f64(vdupq_n_f64(p.r[4]), Y)),
                      vmulq_f64(vdupq_n_f64(p.r[5]), Z)),
            vdupq_n_f64(p.t[1]));
        float64x2_t z = vaddq_f64(
            vaddq_f64(vaddq_f64(vmulq_f64(vdupq_n_f64(p.r[6]), X),
                                vmulq_f64(vdupq_n_f64(p.r[7]), Y)),
                      vmulq_f64(vdupq_n_f64(p.r[8]), Z)),
            vdupq_n_f64(p.t[2]));
        float64x2_t u = vaddq_f64(vmulq_f64(vdupq_n_f64(p.fx), vdivq_f64(x, z)),
                                  vdupq_n_f64(p.cx));
        float64x2_t v = vaddq_f64(vmulq_f64(vdupq_n_f64(p.fy), vdivq_f64(y, z)),
                                  vdupq_n_f64(p.cy));
        uint64x2_t ok = vcgtq_f64(z, vdupq_n_f64(p.near_eps));
        ok = vandq_u64(ok, vcgeq_f64(u, vdupq_n_f64(0.0)));
        ok = vandq_u64(ok, vcltq_f64(u, vdupq_n_f64(p.width)));
        ok = vandq_u64(ok, vcgeq_f64(v, vdupq_n_f64(0.0)));
        ok = vandq_u64(ok, vcltq_f64(v, vdupq_n_f64(p.height)));
        vst1q_f64(us + i, vreinterpretq_f64_u64(
                              vandq_u64(vreinterpretq_u64_f64(u), ok)));
        vst1q_f64(vs + i, vreinterpretq_f64_u64(
                              vandq_u64(vreinterpretq_u64_f64(v), ok)));
        vst1q_f64(zc + i, vreinterpretq_f64_u64(
                              vandq_u64(vreinterpretq_u64_f64(z), ok)));
        valid[i + 0] = vgetq_lane_u64(ok, 0) ? 1 : 0;
        valid[i + 1] = vgetq_lane_u64(ok, 1) ? 1 : 0;
    }
    for (size_t i = n2; i < n; ++i) {
        double X = xs[i], Y = ys[i], Z = zs[i];
        double x = ((p.r[0] * X + p.r[1] * Y) + p.r[2] * Z) + p.t[0];
        double y = ((p.r[3] * X + p.r[4] * Y) + p.r[5] * Z) + p.t[1];
        double z = ((p.r[6] * X + p.r[7] * Y) + p.r[8] * Z) + p.t[2];
        double u = p.fx * (x / z) + p.cx;
        double v = p.fy * (y / z) + p.cy;
        bool ok = (z > p.near_eps) & (u >= 0.0) & (u < p.width) & (v >= 0.0) &
                  (v < p.height);
        us[i] = ok ? u : 0.0;
        vs[i] = ok ? v : 0.0;
        zc[i] = ok ? z : 0.0;
        valid[i] = ok ? 1 : 0;
    }
}

}  // namespace

const Ops& neon_ops() {
    static const Ops ops = {dot_neon, sum_sq_diff_finite_neon, add_neon,
                            axpy_neon, project_neon, "neon"};
    return ops;
}

}  // namespace reg3d::kernels
