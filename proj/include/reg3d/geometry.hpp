#pragma once

// Pinhole projection, z-buffer splat rendering, visibility sets, point-map
// merging, voxel downsampling, back-projection and cross-view depth warping.
// Everything here is a pure function; per-view renders can run on separate
// threads and the pixel tie rule keeps results independent of thread count.

#include "reg3d/scene.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace reg3d {

struct RenderConfig {
    double splat_side_d = 2.0;   // projected point square side, pixels
    double near_epsilon = 1e-6;  // cull camera depths <= this, meters
};

inline constexpr uint32_t kNoPoint = 0xFFFFFFFFu;

// Per-pixel nearest depth and the id of the point that produced it.
// winner[i] == kNoPoint exactly where zbuf[i] is +inf.
struct VisibilityBuffer {
    int width = 0, height = 0;
    std::vector<double> zbuf;
    std::vector<uint32_t> winner;
};

struct VisibilitySet {
    int view_id = 0;
    std::vector<uint32_t> visible;  // sorted, unique point ids
};

struct Projection {
    double u = 0.0, v = 0.0;  // continuous pixels
    double z = 0.0;           // camera-space depth, meters
};

// Empty when the point is behind the near plane or projects outside
// [0,width)x[0,height).
std::optional<Projection> project_point(Vec3 p, const CameraIntrinsics& intr,
                                        const CameraExtrinsics& extr,
                                        double near_epsilon = 1e-6);

// Splats every point as a square of side splat_side_d centered on its
// projection; a pixel is covered iff its center (col+0.5, row+0.5) lies in
// the square. Nearest depth wins, equal depths go to the lower point id.
VisibilityBuffer render_visibility(const PointCloud& cloud,
                                   const CameraIntrinsics& intr,
                                   const CameraExtrinsics& extr,
                                   const RenderConfig& cfg);

VisibilitySet visible_set(const VisibilityBuffer& buf, int view_id);

// One point per valid depth pixel, placed at the pixel center's ray.
PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& intr,
                        const CameraExtrinsics& extr);

// Concatenates in input order; ids renumber to 0..n-1.
PointCloud merge_point_clouds(const std::vector<PointCloud>& clouds);

// Streaming voxel-grid centroid accumulator. Feeding clouds in order and
// finalizing is exactly merge_point_clouds + voxel_downsample.
class VoxelAccumulator {
public:
    explicit VoxelAccumulator(double voxel_size);
    void add(const PointCloud& cloud);
    void add_point(double x, double y, double z);
    PointCloud finalize() const;  // centroids ordered by lexicographic cell index

private:
    struct Cell {
        double sx = 0.0, sy = 0.0, sz = 0.0;
        uint64_t count = 0;
    };
    struct KeyHash {
        size_t operator()(const std::array<int64_t, 3>& k) const;
    };
    double voxel_size_;
    std::unordered_map<std::array<int64_t, 3>, Cell, KeyHash> cells_;
};

// Replaces all points sharing a voxel cell (floor(coord / voxel_size) per
// axis) with their centroid; output ordered by lexicographic cell index.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

struct DepthSource {
    DepthMap depth;
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
};

struct WarpResult {
    DepthMap depth;                 // warped depth; NaN where uncovered
    std::vector<uint8_t> coverage;  // 1 where covered, row-major
};

// Back-projects all sources, renders the merged cloud into the target view.
WarpResult warp_depth(const std::vector<DepthSource>& sources,
                      const CameraIntrinsics& target_intr,
                      const CameraExtrinsics& target_extr,
                      const RenderConfig& cfg);

}  // namespace reg3d
