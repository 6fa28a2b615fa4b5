#include "reg3d/masking.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace reg3d {

std::vector<uint16_t> salient_objects(const std::vector<SegmentationMap>& segs,
                                      const std::vector<uint16_t>& background_labels,
                                      int min_pixels) {
    std::unordered_map<uint16_t, uint64_t> counts;
    for (const SegmentationMap& seg : segs) {
        for (uint16_t label : seg.labels) ++counts[label];
    }
    for (uint16_t bg : background_labels) counts.erase(bg);

    std::vector<std::pair<uint16_t, uint64_t>> ranked;
    for (auto [id, n] : counts) {
        if (n >= uint64_t(min_pixels)) ranked.emplace_back(id, n);
    }
    std::sort(ranked.begin(), ranked.end(), [](auto a, auto b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<uint16_t> out;
    out.reserve(ranked.size());
    for (auto [id, n] : ranked) out.push_back(id);
    return out;
}

std::vector<PatchCoord> object_patch_overlap(const SegmentationMap& seg,
                                             uint16_t object_id, int patch_size) {
    if (patch_size <= 0 || seg.width % patch_size != 0 || seg.height % patch_size != 0)
        throw std::invalid_argument(
            "object_patch_overlap: seg dims not divisible by patch size");
    const int ph = seg.height / patch_size, pw = seg.width / patch_size;
    std::vector<uint8_t> hit(size_t(ph) * pw, 0);
    for (int r = 0; r < seg.height; ++r) {
        for (int c = 0; c < seg.width; ++c) {
            if (seg.at(r, c) == object_id)
                hit[size_t(r / patch_size) * pw + c / patch_size] = 1;
        }
    }
    std::vector<PatchCoord> out;
    for (int pr = 0; pr < ph; ++pr) {
        for (int pc = 0; pc < pw; ++pc) {
            if (hit[size_t(pr) * pw + pc]) out.push_back({pr, pc});
        }
    }
    return out;
}

ObjectMaskResult object_level_mask(const std::vector<SegmentationMap>& segs,
                                   const SceneManifest& manifest,
                                   const ObjectMaskConfig& cfg, MaskRng& rng) {
    if (segs.empty())
        throw std::invalid_argument("object_level_mask: no segmentation maps");
    const int patch = manifest.patch_size_2d;
    const int width = segs.front().width, height = segs.front().height;
    for (const SegmentationMap& s : segs) {
        if (s.width != width || s.height != height)
            throw std::invalid_argument("object_level_mask: segmentation dims differ");
    }
    if (patch <= 0 || width % patch != 0 || height % patch != 0)
        throw std::invalid_argument(
            "object_level_mask: dims not divisible by patch_size_2d");

    const int n_frames = int(segs.size());
    ObjectMaskResult result;
    result.mask = PatchMask::ones(n_frames, height / patch, width / patch);

    std::vector<uint16_t> remaining =
        salient_objects(segs, cfg.background_labels, cfg.min_pixels);

    int kept_count = 0;
    while (kept_count < cfg.num_objects && !remaining.empty()) {
        size_t pick = size_t(rng.next_below(remaining.size()));
        uint16_t object_id = remaining[pick];
        remaining.erase(remaining.begin() + ptrdiff_t(pick));

        ObjectRecord rec;
        rec.object_id = object_id;
        for (int v = 0; v < n_frames; ++v) {
            std::vector<PatchCoord> patches =
                object_patch_overlap(segs[v], object_id, patch);
            if (!patches.empty()) rec.views.push_back({v, std::move(patches)});
        }
        // single-view objects give the reconstruction nothing to look at
        if (rec.views.size() < 2) continue;

        if (cfg.keep_rule == KeepRule::kMaxOverlapView) {
            size_t best = 0;
            for (size_t i = 1; i < rec.views.size(); ++i) {
                if (rec.views[i].patches.size() > rec.views[best].patches.size())
                    best = i;
            }
            rec.kept_view = rec.views[best].view;
            rec.kept_views = {rec.kept_view};
        } else {
            // retain keep_views randomly chosen views among those that see it
            int m = std::min<int>(cfg.keep_views, int(rec.views.size()) - 1);
            m = std::max(m, 1);
            std::vector<int> order(rec.views.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = rec.views[i].view;
            for (int i = 0; i < m; ++i) {
                size_t j = size_t(i) + size_t(rng.next_below(order.size() - size_t(i)));
                std::swap(order[i], order[j]);
            }
            rec.kept_views.assign(order.begin(), order.begin() + m);
            std::sort(rec.kept_views.begin(), rec.kept_views.end());
            rec.kept_view = rec.kept_views.front();
        }

        for (const ViewOverlap& vo : rec.views) {
            if (std::find(rec.kept_views.begin(), rec.kept_views.end(), vo.view) !=
                rec.kept_views.end())
                continue;
            for (PatchCoord p : vo.patches)
                result.mask.bits[result.mask.index(vo.view, p.row, p.col)] = 0;
        }
        result.records.push_back(std::move(rec));
        ++kept_count;
    }
    return result;
}

FrameMask frame_level_mask(int n_frames, int k_masked, MaskRng& rng) {
    if (k_masked < 0 || k_masked >= n_frames)
        throw std::invalid_argument("frame_level_mask: need 0 <= k_masked < n_frames");
    std::vector<int> order(n_frames);
    for (int i = 0; i < n_frames; ++i) order[i] = i;
    for (int i = 0; i < k_masked; ++i) {
        size_t j = size_t(i) + size_t(rng.next_below(uint64_t(n_frames - i)));
        std::swap(order[i], order[size_t(j)]);
    }
    FrameMask mask;
    mask.n_frames = n_frames;
    mask.masked_views.assign(order.begin(), order.begin() + k_masked);
    std::sort(mask.masked_views.begin(), mask.masked_views.end());
    return mask;
}

}  // namespace reg3d
