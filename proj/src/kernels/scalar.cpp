#include "reg3d/kernels.hpp"

#include <cmath>

// Scalar reference. The four-lane accumulation below is the contract the
// SIMD variants reproduce lane for lane; do not "simplify" it into a single
// running sum.

namespace reg3d::kernels {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        acc0 = acc0 + a[i + 0] * b[i + 0];
        acc1 = acc1 + a[i + 1] * b[i + 1];
        acc2 = acc2 + a[i + 2] * b[i + 2];
        acc3 = acc3 + a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) tail = tail + a[i] * b[i];
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

double sum_sq_diff_finite_scalar(const double* a, const double* b, size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    size_t n4 = n & ~size_t(3);
    for (size_t i = 0; i < n4; i += 4) {
        double d0 = a[i + 0] - b[i + 0];
        double d1 = a[i + 1] - b[i + 1];
        double d2 = a[i + 2] - b[i + 2];
        double d3 = a[i + 3] - b[i + 3];
        acc0 = acc0 + (std::isfinite(a[i + 0]) && std::isfinite(b[i + 0]) ? d0 * d0 : 0.0);
        acc1 = acc1 + (std::isfinite(a[i + 1]) && std::isfinite(b[i + 1]) ? d1 * d1 : 0.0);
        acc2 = acc2 + (std::isfinite(a[i + 2]) && std::isfinite(b[i + 2]) ? d2 * d2 : 0.0);
        acc3 = acc3 + (std::isfinite(a[i + 3]) && std::isfinite(b[i + 3]) ? d3 * d3 : 0.0);
    }
    double tail = 0.0;
    for (size_t i = n4; i < n; ++i) {
        double d = a[i] - b[i];
        tail = tail + (std::isfinite(a[i]) && std::isfinite(b[i]) ? d * d : 0.0);
    }
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

void add_scalar(double* dst, const double* a, const double* b, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void axpy_scalar(double* dst, double s, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] = dst[i] + s * x[i];
}

void project_scalar(const ProjectParams& p, const double* xs, const double* ys,
                    const double* zs, size_t n, double* us, double* vs,
                    double* zc, uint8_t* valid) {
    for (size_t i = 0; i < n; ++i) {
        double X = xs[i], Y = ys[i], Z = zs[i];
        double x = ((p.r[0] * X + p.r[1] * Y) + p.r[2] * Z) + p.t[0];
        double y = ((p.r[3] * X + p.r[4] * Y) + p.r[5] * Z) + p.t[1];
        double z = ((p.r[6] * X + p.r[7] * Y) + p.r[8] * Z) + p.t[2];
        double u = p.fx * (x / z) + p.cx;
        double v = p.fy * (y / z) + p.cy;
        // NaN compares false on every clause, matching the SIMD masks.
        bool ok = (z > p.near_eps) & (u >= 0.0) & (u < p.width) & (v >= 0.0) &
                  (v < p.height);
        us[i] = ok ? u : 0.0;
        vs[i] = ok ? v : 0.0;
        zc[i] = ok ? z : 0.0;
        valid[i] = ok ? 1 : 0;
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {dot_scalar, sum_sq_diff_finite_scalar, add_scalar,
                            axpy_scalar, project_scalar, "scalar"};
    return ops;
}

}  // namespace reg3d::kernels
