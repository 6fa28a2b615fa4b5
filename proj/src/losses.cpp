#include "reg3d/losses.hpp"

#include "reg3d/kernels.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace reg3d {
namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

FeatureGrid merge_patches_2x2(const FeatureGrid& f3d, const ProjectorWeights& w) {
    require(f3d.patches_h % 2 == 0 && f3d.patches_w % 2 == 0,
            "merge_patches_2x2: patch grid dims must be even");
    require(w.rows == 4 * f3d.dim,
            "merge_patches_2x2: projector rows must equal 4 * feature dim");
    require(int(w.matrix.size()) == w.rows * w.cols,
            "merge_patches_2x2: projector matrix size mismatch");
    require(w.bias.empty() || int(w.bias.size()) == w.cols,
            "merge_patches_2x2: projector bias size mismatch");

    const auto& ops = kernels::active();
    const int dim = f3d.dim;
    FeatureGrid out =
        FeatureGrid::zeros(f3d.n_frames, f3d.patches_h / 2, f3d.patches_w / 2, w.cols);
    for (int f = 0; f < f3d.n_frames; ++f) {
        for (int br = 0; br < out.patches_h; ++br) {
            for (int bc = 0; bc < out.patches_w; ++bc) {
                double* dst = out.patch(f, br, bc);
                if (!w.bias.empty())
                    std::memcpy(dst, w.bias.data(), size_t(w.cols) * sizeof(double));
                // block order: top-left, top-right, bottom-left, bottom-right
                for (int q = 0; q < 4; ++q) {
                    const double* src =
                        f3d.patch(f, 2 * br + q / 2, 2 * bc + q % 2);
                    for (int k = 0; k < dim; ++k) {
                        const double* row = w.matrix.data() +
                                            size_t(q * dim + k) * w.cols;
                        ops.axpy(dst, src[k], row, size_t(w.cols));
                    }
                }
            }
        }
    }
    return out;
}

FeatureGrid fuse_tokens(const FeatureGrid& f2d, const FeatureGrid& f3d_merged,
                        const PatchMask& mask) {
    require(f2d.same_shape(f3d_merged), "fuse_tokens: feature grid shapes differ");
    require(mask.n_frames == f2d.n_frames && mask.patches_h == f2d.patches_h &&
                mask.patches_w == f2d.patches_w,
            "fuse_tokens: mask dims mismatch");
    const auto& ops = kernels::active();
    FeatureGrid out = f2d;  // masked patches stay 2D-only
    const size_t dim = size_t(f2d.dim);
    for (size_t p = 0; p < f2d.patch_count(); ++p) {
        if (!mask.bits[p]) continue;
        double* dst = out.data.data() + p * dim;
        ops.add(dst, f2d.data.data() + p * dim, f3d_merged.data.data() + p * dim, dim);
    }
    return out;
}

FeatureGrid fusion_target(const FeatureGrid& f2d, const FeatureGrid& f3d_merged) {
    require(f2d.same_shape(f3d_merged), "fusion_target: feature grid shapes differ");
    FeatureGrid out = f2d;
    kernels::active().add(out.data.data(), f2d.data.data(), f3d_merged.data.data(),
                          f2d.data.size());
    return out;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "cosine_distance: length mismatch");
    require(!a.empty(), "cosine_distance: empty input");
    const auto& ops = kernels::active();
    double ab = ops.dot(a.data(), b.data(), a.size());
    double aa = ops.dot(a.data(), a.data(), a.size());
    double bb = ops.dot(b.data(), b.data(), b.size());
    if (aa == 0.0 || bb == 0.0)
        throw std::domain_error("cosine_distance: zero-norm input");
    // sqrt(aa * bb) keeps D(a, a) == -1 exactly
    double d = -(ab / std::sqrt(aa * bb));
    return d < -1.0 ? -1.0 : (d > 1.0 ? 1.0 : d);
}

double object_recon_loss(const FeatureGrid& targets, const FeatureGrid& recon,
                         const PatchMask& mask, double alpha) {
    require(targets.same_shape(recon), "object_recon_loss: grid shapes differ");
    require(mask.n_frames == targets.n_frames && mask.patches_h == targets.patches_h &&
                mask.patches_w == targets.patches_w,
            "object_recon_loss: mask dims mismatch");
    const size_t dim = size_t(targets.dim);
    uint64_t masked = 0;
    double sum = 0.0;
    // fixed frame-major, row-major order
    for (size_t p = 0; p < targets.patch_count(); ++p) {
        if (mask.bits[p]) continue;
        ++masked;
        try {
            sum += cosine_distance({targets.data.data() + p * dim, dim},
                                   {recon.data.data() + p * dim, dim});
        } catch (const std::domain_error&) {
            size_t per_frame = size_t(targets.patches_h) * targets.patches_w;
            throw std::domain_error(
                "object_recon_loss: zero-norm feature at frame " +
                std::to_string(p / per_frame) + " patch (" +
                std::to_string(p % per_frame / targets.patches_w) + ", " +
                std::to_string(p % size_t(targets.patches_w)) + ")");
        }
    }
    if (masked == 0) return 0.0;
    // alpha * (sum / G): recon == target everywhere gives exactly -alpha
    return alpha * (sum / double(masked));
}

double frame_recon_loss(const std::vector<DepthMap>& gt,
                        const std::vector<DepthMap>& pred, const FrameMask& fmask,
                        double beta) {
    if (fmask.masked_views.empty()) return 0.0;
    const auto& ops = kernels::active();
    double sum = 0.0;
    for (int view : fmask.masked_views) {
        require(view >= 0 && size_t(view) < gt.size(),
                "frame_recon_loss: masked view outside ground-truth range");
        require(size_t(view) < pred.size() && pred[view].width > 0,
                "frame_recon_loss: missing prediction for a masked view");
        const DepthMap& g = gt[view];
        const DepthMap& p = pred[view];
        require(g.width == p.width && g.height == p.height,
                "frame_recon_loss: depth dims mismatch on a masked view");
        sum += ops.sum_sq_diff_finite(g.values.data(), p.values.data(),
                                      g.values.size());
    }
    return beta * (sum / double(fmask.masked_views.size()));
}

LossReport total_loss(double l_text, double l_object, double l_frame,
                      const LossConfig& cfg, uint64_t g_masked_patches,
                      uint64_t k_masked_frames) {
    require(std::isfinite(l_text) && std::isfinite(l_object) && std::isfinite(l_frame),
            "total_loss: non-finite loss component");
    require(std::isfinite(cfg.lambda1) && std::isfinite(cfg.lambda2),
            "total_loss: non-finite weight");
    LossReport r;
    r.l_text = l_text;
    r.l_object = l_object;
    r.l_frame = l_frame;
    r.l_total = (l_text + cfg.lambda1 * l_object) + cfg.lambda2 * l_frame;
    r.g_masked_patches = g_masked_patches;
    r.k_masked_frames = k_masked_frames;
    return r;
}

}  // namespace reg3d
