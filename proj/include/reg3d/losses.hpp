#pragma once

// Feature compression, multimodal token fusion, and the reconstruction loss
// kernels. Pure numeric operations over FeatureGrids with pinned summation
// order (frame-major, row-major) so results are bit-reproducible.

#include "reg3d/masking.hpp"
#include "reg3d/scene.hpp"

#include <span>
#include <vector>

namespace reg3d {

// One affine map applied to each concatenated 2x2 patch block.
struct ProjectorWeights {
    int rows = 0, cols = 0;
    std::vector<double> matrix;  // row-major, rows x cols
    std::vector<double> bias;    // size cols, or empty
};

struct LossConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

struct LossReport {
    double l_text = 0.0;
    double l_object = 0.0;
    double l_frame = 0.0;
    double l_total = 0.0;
    uint64_t g_masked_patches = 0;
    uint64_t k_masked_frames = 0;
};

// Halves the patch grid: each output patch is the affine image of its 2x2
// input block concatenated in row-major block order (top-left, top-right,
// bottom-left, bottom-right). Requires w.rows == 4 * f3d.dim.
FeatureGrid merge_patches_2x2(const FeatureGrid& f3d, const ProjectorWeights& w);

// v = f2d + f3d where the mask bit is 1, v = f2d where it is 0.
FeatureGrid fuse_tokens(const FeatureGrid& f2d, const FeatureGrid& f3d_merged,
                        const PatchMask& mask);

// The unmasked fusion: elementwise sum at every patch.
FeatureGrid fusion_target(const FeatureGrid& f2d, const FeatureGrid& f3d_merged);

// -(a.b)/(|a||b|), in [-1, 1]; throws on zero-norm input.
double cosine_distance(std::span<const double> a, std::span<const double> b);

// (alpha / G) * sum of cosine_distance over masked (bit 0) patches;
// 0 when no patch is masked.
double object_recon_loss(const FeatureGrid& targets, const FeatureGrid& recon,
                         const PatchMask& mask, double alpha);

// (beta / K) * sum over masked views of the squared depth error, skipping
// pixels invalid in either map; 0 when no view is masked. gt and pred are
// indexed by view.
double frame_recon_loss(const std::vector<DepthMap>& gt,
                        const std::vector<DepthMap>& pred, const FrameMask& fmask,
                        double beta);

// l_total = l_text + lambda1 * l_object + lambda2 * l_frame.
LossReport total_loss(double l_text, double l_object, double l_frame,
                      const LossConfig& cfg, uint64_t g_masked_patches = 0,
                      uint64_t k_masked_frames = 0);

}  // namespace reg3d
