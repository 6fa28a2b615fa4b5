#include "reg3d/kernels.hpp"

#include <cmath>
#include <immintrin.h>
#include <limits>

// AVX2 variants. Lane j of a vector accumulator carries exactly the scalar
// reference's acc[j], and explicit mul+add keeps rounding identical, so
// these return the same bits as scalar_ops().

namespace reg3d::kernels {
namespace {

inline double reduce4(__m256d acc, double tail) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                               _mm256_loadu_pd(b + i)));
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) tail = tail + a[i] * b[i];
    return reduce4(acc, tail);
}

double sum_sq_diff_finite_avx2(const double* a, const double* b, size_t n) {
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d acc = _mm256_setzero_pd();
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d d = _mm256_sub_pd(va, vb);
        __m256d sq = _mm256_mul_pd(d, d);
        // finite(x) == |x| < inf; ordered compare rejects NaN too
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(abs_pd(va), inf, _CMP_LT_OQ),
                                   _mm256_cmp_pd(abs_pd(vb), inf, _CMP_LT_OQ));
        acc = _mm256_add_pd(acc, _mm256_and_pd(sq, ok));
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) {
        double d = a[i] - b[i];
        tail = tail + (std::isfinite(a[i]) && std::isfinite(b[i]) ? d * d : 0.0);
    }
    return reduce4(acc, tail);
}

void add_avx2(double* dst, const double* a, const double* b, size_t n) {
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    }
    for (size_t i = n4; i < n; ++i) dst[i] = a[i] + b[i];
}

void axpy_avx2(double* dst, double s, const double* x, size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(dst + i),
                                    _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(dst + i, acc);
    }
    for (size_t i = n4; i < n; ++i) dst[i] = dst[i] + s * x[i];
}

void project_avx2(const ProjectParams& p, const double* xs, const double* ys,
                  const double* zs, size_t n, double* us, double* vs,
                  double* zc, uint8_t* valid) {
    const __m256d r0 = _mm256_set1_pd(p.r[0]), r1 = _mm256_set1_pd(p.r[1]),
                  r2 = _mm256_set1_pd(p.r[2]), r3 = _mm256_set1_pd(p.r[3]),
                  r4 = _mm256_set1_pd(p.r[4]), r5 = _mm256_set1_pd(p.r[5]),
                  r6 = _mm256_set1_pd(p.r[6]), r7 = _mm256_set1_pd(p.r[7]),
                  r8 = _mm256_set1_pd(p.r[8]);
    const __m256d t0 = _mm256_set1_pd(p.t[0]), t1 = _mm256_set1_pd(p.t[1]),
                  t2 = _mm256_set1_pd(p.t[2]);
    const __m256d fx = _mm256_set1_pd(p.fx), fy = _mm256_set1_pd(p.fy);
    const __m256d cx = _mm256_set1_pd(p.cx), cy = _mm256_set1_pd(p.cy);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d w = _mm256_set1_pd(p.width), h = _mm256_set1_pd(p.height);
    const __m256d eps = _mm256_set1_pd(p.near_eps);

    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        __m256d X = _mm256_loadu_pd(xs + i);
        __m256d Y = _mm256_loadu_pd(ys + i);
        __m256d Z = _mm256_loadu_pd(zs + i);
        __m256d x = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r0, X), _mm256_mul_pd(r1, Y)),
                          _mm256_mul_pd(r2, Z)),
            t0);
        __m256d y = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r3, X), _mm256_mul_pd(r4, Y)),
                          _mm256_mul_pd(r5, Z)),
            t1);
        __m256d z = _mm256_add_pd(
            _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r6, X), _mm256_mul_pd(r7, Y)),
                          _mm256_mul_pd(r8, Z)),
            t2);
        __m256d u = _mm256_add_pd(_mm256_mul_pd(fx, _mm256_div_pd(x, z)), cx);
        __m256d v = _mm256_add_pd(_mm256_mul_pd(fy, _mm256_div_pd(y, z)), cy);
        __m256d ok = _mm256_cmp_pd(z, eps, _CMP_GT_OQ);
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(u, zero, _CMP_GE_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(u, w, _CMP_LT_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(v, zero, _CMP_GE_OQ));
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(v, h, _CMP_LT_OQ));
        _mm256_storeu_pd(us + i, _mm256_and_pd(u, ok));
        _mm256_storeu_pd(vs + i, _mm256_and_pd(v, ok));
        _mm256_storeu_pd(zc + i, _mm256_and_pd(z, ok));
        int bits = _mm256_movemask_pd(ok);
        valid[i + 0] = (bits >> 0) & 1;
        valid[i + 1] = (bits >> 1) & 1;
        valid[i + 2] = (bits >> 2) & 1;
        valid[i + 3] = (bits >> 3) & 1;
    }
    for (size_t i = n4; i < n; ++i) {
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

const Ops& avx2_ops() {
    static const Ops ops = {dot_avx2, sum_sq_diff_finite_avx2, add_avx2,
                            axpy_avx2, project_avx2, "avx2"};
    return ops;
}

}  // namespace reg3d::kernels
