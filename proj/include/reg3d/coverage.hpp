#pragma once

// Adaptive frame sampling: uniform candidate selection, greedy maximum
// coverage over per-view visibility sets, the exhaustive reference solver,
// and the end-to-end sampling pipeline.

#include "reg3d/geometry.hpp"
#include "reg3d/scene.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace reg3d {

struct SamplerConfig {
    int total_frames = 0;   // T: frames in the sequence
    int candidates = 0;     // M: uniformly sampled candidates, M <= T
    int select = 0;         // K: frames to keep, 1 <= K < M
    double voxel_size = 0.05;
    RenderConfig render;
    uint64_t seed = 0;      // echoed into the report; the pipeline is deterministic
};

struct SelectionReport {
    std::vector<int> candidate_ids;        // frame ids of the M candidates
    std::vector<int> selected_ids;         // K frame ids in pick order
    std::vector<uint64_t> marginal_gains;  // new points covered per pick
    uint64_t total_points = 0;             // downsampled cloud size
    uint64_t covered_points = 0;           // |union of selected visibility sets|
    uint64_t uniform_baseline_covered = 0; // |union over the first K candidates|
    SamplerConfig config;
};

// indices = floor(i * total / count) for i in 0..count-1; strictly increasing.
std::vector<int> uniform_sample(int total, int count);

struct GreedyResult {
    std::vector<size_t> selected;        // indices into the input set list
    std::vector<uint64_t> gains;         // marginal gain of each pick
    uint64_t covered = 0;
};

// Iteration k picks the set maximizing |V_i \ C|. Nonzero ties go to the
// lowest index. When every remaining gain is zero, picks the candidate
// maximizing its minimum index distance to the already-selected ones
// (ties again to the lowest index) so saturated selections stay spread out.
GreedyResult greedy_max_coverage(const std::vector<VisibilitySet>& sets, int k);

struct ExhaustiveResult {
    std::vector<size_t> selected;  // lexicographically smallest argmax subset
    uint64_t covered = 0;
};

// Enumerates every K-subset. Refuses more than 20 sets; this is the
// reference solver, not a production path.
ExhaustiveResult exhaustive_max_coverage(const std::vector<VisibilitySet>& sets,
                                         int k);

// Loads the depth map for a frame id; throws on failure.
using DepthProvider = std::function<DepthMap(int frame_id)>;

// uniform_sample -> back_project per candidate -> merge -> voxel_downsample
// -> render + visible_set per candidate -> greedy_max_coverage. Pure
// function of its inputs; `threads` only parallelizes per-candidate renders.
SelectionReport adaptive_sample(const SceneManifest& manifest,
                                const DepthProvider& depths,
                                const SamplerConfig& cfg, int threads = 1);

}  // namespace reg3d
