#pragma once

// Object-level patch masking and frame-level view masking. Masks are binary
// patch grids over the fused-token layout: bit 1 keeps the 3D geometry
// feature, bit 0 withholds it.

#include "reg3d/scene.hpp"

#include <cstdint>
#include <vector>

namespace reg3d {

// splitmix64 with a Lemire-style range reduction. Fixed here so identical
// seeds reproduce identical masks across platforms and releases.
class MaskRng {
public:
    explicit MaskRng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        ++draws_;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n); n > 0.
    uint64_t next_below(uint64_t n) {
        return uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    uint64_t draws() const { return draws_; }

private:
    uint64_t state_;
    uint64_t draws_ = 0;
};

struct PatchMask {
    int n_frames = 0, patches_h = 0, patches_w = 0;
    std::vector<uint8_t> bits;  // 1 = geometry kept, 0 = masked; frame-major row-major

    size_t index(int frame, int row, int col) const {
        return (size_t(frame) * patches_h + row) * patches_w + col;
    }
    uint8_t at(int frame, int row, int col) const { return bits[index(frame, row, col)]; }

    static PatchMask ones(int n_frames, int patches_h, int patches_w) {
        PatchMask m;
        m.n_frames = n_frames;
        m.patches_h = patches_h;
        m.patches_w = patches_w;
        m.bits.assign(size_t(n_frames) * patches_h * patches_w, 1);
        return m;
    }
};

struct FrameMask {
    int n_frames = 0;
    std::vector<int> masked_views;  // sorted ascending
};

struct PatchCoord {
    int row = 0, col = 0;
    friend bool operator==(PatchCoord, PatchCoord) = default;
};

struct ViewOverlap {
    int view = 0;                     // position within the provided frame list
    std::vector<PatchCoord> patches;  // patches the object touches, row-major order
};

struct ObjectRecord {
    uint16_t object_id = 0;
    std::vector<ViewOverlap> views;  // every view where the object appears
    int kept_view = 0;               // view with maximal overlap count
    std::vector<int> kept_views;     // all retained views; {kept_view} by default
};

// How object_level_mask picks the views that keep their geometry.
enum class KeepRule {
    kMaxOverlapView,  // single best-overlap view (default)
    kRandomViews,     // retain `keep_views` randomly chosen views
};

struct ObjectMaskConfig {
    int num_objects = 3;
    std::vector<uint16_t> background_labels = {0};
    int min_pixels = 64;
    KeepRule keep_rule = KeepRule::kMaxOverlapView;
    int keep_views = 1;  // used by kRandomViews
};

// Object ids present anywhere, excluding background, with total pixel count
// >= min_pixels; sorted by descending count, ties by ascending id.
std::vector<uint16_t> salient_objects(const std::vector<SegmentationMap>& segs,
                                      const std::vector<uint16_t>& background_labels,
                                      int min_pixels);

// Patches (row, col) whose patch_size x patch_size block contains at least
// one pixel of object_id, in row-major order.
std::vector<PatchCoord> object_patch_overlap(const SegmentationMap& seg,
                                             uint16_t object_id, int patch_size);

struct ObjectMaskResult {
    PatchMask mask;
    std::vector<ObjectRecord> records;
};

// Draws objects without replacement from the salient list, keeps each one's
// geometry in its best-overlap view (ties to the lowest view index) and
// clears its overlap patches everywhere else. Objects seen in fewer than
// two views are skipped and replaced by the next draw.
ObjectMaskResult object_level_mask(const std::vector<SegmentationMap>& segs,
                                   const SceneManifest& manifest,
                                   const ObjectMaskConfig& cfg, MaskRng& rng);

// k_masked view indices sampled uniformly without replacement.
FrameMask frame_level_mask(int n_frames, int k_masked, MaskRng& rng);

}  // namespace reg3d
