#include "reg3d/geometry.hpp"

#include "reg3d/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace reg3d {
namespace {

constexpr size_t kProjectChunk = 16384;

kernels::ProjectParams make_params(const CameraIntrinsics& intr,
                                   const CameraExtrinsics& extr,
                                   double near_epsilon) {
    kernels::ProjectParams p;
    for (int i = 0; i < 9; ++i) p.r[i] = extr.rotation.m[i];
    p.t[0] = extr.translation.x;
    p.t[1] = extr.translation.y;
    p.t[2] = extr.translation.z;
    p.fx = intr.fx;
    p.fy = intr.fy;
    p.cx = intr.cx;
    p.cy = intr.cy;
    p.width = double(intr.width);
    p.height = double(intr.height);
    p.near_eps = near_epsilon;
    return p;
}

}  // namespace

std::optional<Projection> project_point(Vec3 p, const CameraIntrinsics& intr,
                                        const CameraExtrinsics& extr,
                                        double near_epsilon) {
    kernels::ProjectParams params = make_params(intr, extr, near_epsilon);
    double u, v, z;
    uint8_t ok;
    kernels::active().project(params, &p.x, &p.y, &p.z, 1, &u, &v, &z, &ok);
    if (!ok) return std::nullopt;
    return Projection{u, v, z};
}

VisibilityBuffer render_visibility(const PointCloud& cloud,
                                   const CameraIntrinsics& intr,
                                   const CameraExtrinsics& extr,
                                   const RenderConfig& cfg) {
    if (cloud.size() >= size_t(kNoPoint))
        throw std::invalid_argument("render_visibility: cloud too large");
    const int w = intr.width, h = intr.height;
    VisibilityBuffer buf;
    buf.width = w;
    buf.height = h;
    buf.zbuf.assign(size_t(w) * h, std::numeric_limits<double>::infinity());
    buf.winner.assign(size_t(w) * h, kNoPoint);

    kernels::ProjectParams params = make_params(intr, extr, cfg.near_epsilon);
    const double half = cfg.splat_side_d * 0.5;

    std::vector<double> us(kProjectChunk), vs(kProjectChunk), zc(kProjectChunk);
    std::vector<uint8_t> valid(kProjectChunk);
    for (size_t base = 0; base < cloud.size(); base += kProjectChunk) {
        size_t n = std::min(kProjectChunk, cloud.size() - base);
        kernels::active().project(params, cloud.xs.data() + base,
                                  cloud.ys.data() + base, cloud.zs.data() + base,
                                  n, us.data(), vs.data(), zc.data(), valid.data());
        for (size_t i = 0; i < n; ++i) {
            if (!valid[i]) continue;
            const double x = us[i], y = vs[i], z = zc[i];
            const uint32_t id = uint32_t(base + i);
            // candidate range is padded by the floor/ceil slack; the
            // canonical |center - proj| <= d/2 test decides membership
            int c0 = std::max(0, int(std::floor(x - half - 0.5)));
            int c1 = std::min(w - 1, int(std::ceil(x + half - 0.5)));
            int r0 = std::max(0, int(std::floor(y - half - 0.5)));
            int r1 = std::min(h - 1, int(std::ceil(y + half - 0.5)));
            for (int r = r0; r <= r1; ++r) {
                if (!(std::abs((r + 0.5) - y) <= half)) continue;
                for (int c = c0; c <= c1; ++c) {
                    if (!(std::abs((c + 0.5) - x) <= half)) continue;
                    size_t idx = size_t(r) * w + c;
                    double zb = buf.zbuf[idx];
                    if (z < zb || (z == zb && id < buf.winner[idx])) {
                        buf.zbuf[idx] = z;
                        buf.winner[idx] = id;
                    }
                }
            }
        }
    }
    return buf;
}

VisibilitySet visible_set(const VisibilityBuffer& buf, int view_id) {
    VisibilitySet vs;
    vs.view_id = view_id;
    vs.visible.reserve(256);
    for (uint32_t id : buf.winner) {
        if (id != kNoPoint) vs.visible.push_back(id);
    }
    std::sort(vs.visible.begin(), vs.visible.end());
    vs.visible.erase(std::unique(vs.visible.begin(), vs.visible.end()),
                     vs.visible.end());
    return vs;
}

PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& intr,
                        const CameraExtrinsics& extr) {
    if (depth.width != intr.width || depth.height != intr.height)
        throw std::invalid_argument("back_project: depth dims mismatch intrinsics");
    Mat3 rt = extr.rotation.transposed();
    Vec3 t = extr.translation;
    PointCloud cloud;
    cloud.reserve(depth.values.size());
    for (int r = 0; r < depth.height; ++r) {
        for (int c = 0; c < depth.width; ++c) {
            double z = depth.at(r, c);
            if (!std::isfinite(z)) continue;
            Vec3 pc{((c + 0.5) - intr.cx) * z / intr.fx,
                    ((r + 0.5) - intr.cy) * z / intr.fy, z};
            cloud.push_back(rt * (pc - t));
        }
    }
    return cloud;
}

PointCloud merge_point_clouds(const std::vector<PointCloud>& clouds) {
    size_t total = 0;
    for (const PointCloud& c : clouds) total += c.size();
    PointCloud merged;
    merged.reserve(total);
    for (const PointCloud& c : clouds) merged.append(c);
    return merged;
}

size_t VoxelAccumulator::KeyHash::operator()(const std::array<int64_t, 3>& k) const {
    uint64_t h = 0x9E3779B97F4A7C15ull;
    for (int64_t v : k) {
        uint64_t z = uint64_t(v) + h;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        h = z ^ (z >> 31);
    }
    return size_t(h);
}

VoxelAccumulator::VoxelAccumulator(double voxel_size) : voxel_size_(voxel_size) {
    if (!(voxel_size > 0.0))
        throw std::invalid_argument("voxel_size must be positive");
}

void VoxelAccumulator::add_point(double x, double y, double z) {
    std::array<int64_t, 3> key{int64_t(std::floor(x / voxel_size_)),
                               int64_t(std::floor(y / voxel_size_)),
                               int64_t(std::floor(z / voxel_size_))};
    Cell& cell = cells_[key];
    cell.sx += x;
    cell.sy += y;
    cell.sz += z;
    ++cell.count;
}

void VoxelAccumulator::add(const PointCloud& cloud) {
    for (size_t i = 0; i < cloud.size(); ++i)
        add_point(cloud.xs[i], cloud.ys[i], cloud.zs[i]);
}

PointCloud VoxelAccumulator::finalize() const {
    std::vector<std::pair<std::array<int64_t, 3>, const Cell*>> ordered;
    ordered.reserve(cells_.size());
    for (const auto& [key, cell] : cells_) ordered.emplace_back(key, &cell);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    PointCloud out;
    out.reserve(ordered.size());
    for (const auto& [key, cell] : ordered) {
        double n = double(cell->count);
        out.push_back({cell->sx / n, cell->sy / n, cell->sz / n});
    }
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    VoxelAccumulator acc(voxel_size);
    acc.add(cloud);
    return acc.finalize();
}

WarpResult warp_depth(const std::vector<DepthSource>& sources,
                      const CameraIntrinsics& target_intr,
                      const CameraExtrinsics& target_extr,
                      const RenderConfig& cfg) {
    if (sources.empty())
        throw std::invalid_argument("warp_depth: need at least one source");
    PointCloud merged;
    for (const DepthSource& s : sources)
        merged.append(back_project(s.depth, s.intrinsics, s.extrinsics));
    VisibilityBuffer buf = render_visibility(merged, target_intr, target_extr, cfg);

    WarpResult out;
    out.depth.width = target_intr.width;
    out.depth.height = target_intr.height;
    out.depth.values.resize(buf.zbuf.size());
    out.coverage.resize(buf.zbuf.size());
    for (size_t i = 0; i < buf.zbuf.size(); ++i) {
        bool covered = buf.winner[i] != kNoPoint;
        out.coverage[i] = covered ? 1 : 0;
        out.depth.values[i] =
            covered ? buf.zbuf[i] : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace reg3d
