#include "reg3d/coverage.hpp"

#include "reg3d/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace reg3d {
namespace {

// Fixed-universe bitset; word i bit b holds point id 64*i + b.
struct IdBits {
    std::vector<uint64_t> words;

    explicit IdBits(size_t universe) : words((universe + 63) / 64, 0) {}
    void set(uint32_t id) { words[id / 64] |= uint64_t(1) << (id % 64); }
    uint64_t count_new(const IdBits& covered) const {
        uint64_t n = 0;
        for (size_t i = 0; i < words.size(); ++i)
            n += uint64_t(std::popcount(words[i] & ~covered.words[i]));
        return n;
    }
    void merge(const IdBits& other) {
        for (size_t i = 0; i < words.size(); ++i) words[i] |= other.words[i];
    }
    uint64_t count() const {
        uint64_t n = 0;
        for (uint64_t w : words) n += uint64_t(std::popcount(w));
        return n;
    }
};

size_t universe_size(const std::vector<VisibilitySet>& sets) {
    size_t u = 0;
    for (const VisibilitySet& s : sets) {
        if (!s.visible.empty()) u = std::max(u, size_t(s.visible.back()) + 1);
    }
    return u;
}

std::vector<IdBits> to_bits(const std::vector<VisibilitySet>& sets, size_t universe) {
    std::vector<IdBits> out;
    out.reserve(sets.size());
    for (const VisibilitySet& s : sets) {
        IdBits b(universe);
        for (uint32_t id : s.visible) b.set(id);
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

std::vector<int> uniform_sample(int total, int count) {
    if (count < 1 || count > total)
        throw std::invalid_argument("uniform_sample: need 1 <= count <= total");
    std::vector<int> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = int(int64_t(i) * total / count);
    return out;
}

GreedyResult greedy_max_coverage(const std::vector<VisibilitySet>& sets, int k) {
    if (k < 0 || size_t(k) > sets.size())
        throw std::invalid_argument("greedy_max_coverage: need 0 <= k <= |sets|");
    size_t universe = universe_size(sets);
    std::vector<IdBits> bits = to_bits(sets, universe);
    IdBits covered(universe);
    std::vector<char> taken(sets.size(), 0);

    GreedyResult res;
    for (int round = 0; round < k; ++round) {
        uint64_t best_gain = 0;
        size_t best = sets.size();
        for (size_t i = 0; i < sets.size(); ++i) {
            if (taken[i]) continue;
            uint64_t gain = bits[i].count_new(covered);
            if (best == sets.size() || gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        if (best_gain == 0) {
            // coverage saturated: spread the pick away from what we already
            // hold, ties to the lowest index
            int64_t best_dist = -1;
            best = sets.size();
            for (size_t i = 0; i < sets.size(); ++i) {
                if (taken[i]) continue;
                int64_t dist = std::numeric_limits<int64_t>::max();
                for (size_t s : res.selected)
                    dist = std::min(dist, std::abs(int64_t(i) - int64_t(s)));
                if (dist > best_dist) {
                    best_dist = dist;
                    best = i;
                }
            }
        }
        taken[best] = 1;
        covered.merge(bits[best]);
        res.selected.push_back(best);
        res.gains.push_back(best_gain);
    }
    res.covered = covered.count();
    return res;
}

ExhaustiveResult exhaustive_max_coverage(const std::vector<VisibilitySet>& sets,
                                         int k) {
    if (sets.size() > 20)
        throw std::invalid_argument(
            "exhaustive_max_coverage: refusing more than 20 sets");
    if (k < 0 || size_t(k) > sets.size())
        throw std::invalid_argument("exhaustive_max_coverage: need 0 <= k <= |sets|");

    size_t universe = universe_size(sets);
    std::vector<IdBits> bits = to_bits(sets, universe);

    ExhaustiveResult best;
    std::vector<size_t> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = size_t(i);
    bool first = true;
    while (true) {
        IdBits u(universe);
        for (size_t i : pick) u.merge(bits[i]);
        uint64_t cov = u.count();
        // lexicographic enumeration: strict > keeps the smallest argmax
        if (first || cov > best.covered) {
            best.covered = cov;
            best.selected = pick;
            first = false;
        }
        // next combination
        int pos = k - 1;
        while (pos >= 0 && pick[pos] == sets.size() - size_t(k - pos)) --pos;
        if (pos < 0) break;
        ++pick[pos];
        for (int j = pos + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (k == 0) best.selected.clear();
    return best;
}

SelectionReport adaptive_sample(const SceneManifest& manifest,
                                const DepthProvider& depths,
                                const SamplerConfig& cfg, int threads) {
    const int total = int(manifest.frames.size());
    if (cfg.total_frames != total)
        throw std::invalid_argument(
            "adaptive_sample: config total_frames does not match the manifest");
    if (!(cfg.select >= 1 && cfg.select < cfg.candidates && cfg.candidates <= total))
        throw std::invalid_argument(
            "adaptive_sample: need 1 <= select < candidates <= total_frames");

    std::vector<int> candidate_pos = uniform_sample(total, cfg.candidates);

    // Pass 1: back-project each candidate's depth straight into the voxel
    // accumulator, in candidate order, so the result matches
    // merge_point_clouds + voxel_downsample exactly.
    VoxelAccumulator acc(cfg.voxel_size);
    for (int pos : candidate_pos) {
        const Frame& frame = manifest.frames[pos];
        DepthMap depth = depths(frame.frame_id);
        acc.add(back_project(depth, frame.intrinsics, frame.extrinsics));
    }
    PointCloud cloud = acc.finalize();

    // Pass 2: per-candidate visibility over the downsampled cloud.
    std::vector<VisibilitySet> sets(candidate_pos.size());
    parallel_for(candidate_pos.size(), threads, [&](size_t i) {
        const Frame& frame = manifest.frames[candidate_pos[i]];
        VisibilityBuffer buf =
            render_visibility(cloud, frame.intrinsics, frame.extrinsics, cfg.render);
        sets[i] = visible_set(buf, frame.frame_id);
    });

    GreedyResult greedy = greedy_max_coverage(sets, cfg.select);

    SelectionReport report;
    report.config = cfg;
    for (int pos : candidate_pos)
        report.candidate_ids.push_back(manifest.frames[pos].frame_id);
    for (size_t idx : greedy.selected)
        report.selected_ids.push_back(report.candidate_ids[idx]);
    report.marginal_gains = greedy.gains;
    report.total_points = cloud.size();
    report.covered_points = greedy.covered;

    // Baseline: the first K uniform candidates.
    {
        size_t universe = universe_size(sets);
        std::vector<IdBits> bits = to_bits(sets, universe);
        IdBits u(universe);
        for (int i = 0; i < cfg.select; ++i) u.merge(bits[i]);
        report.uniform_baseline_covered = u.count();
    }
    return report;
}

}  // namespace reg3d
