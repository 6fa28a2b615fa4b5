#pragma once

// Seeded synthetic indoor scenes with analytic ray-cast depth and instance
// segmentation. Stands in for real captures: small, deterministic, and with
// exact ground truth for every pixel.

#include "reg3d/masking.hpp"
#include "reg3d/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reg3d {

struct Primitive {
    enum class Kind { kBox, kSphere };
    Kind kind = Kind::kBox;
    uint16_t label = 0;  // instance id; background is 0
    Vec3 box_min, box_max;  // boxes
    Vec3 center;            // spheres
    double radius = 0.0;
};

// Axis-aligned room shell plus the objects inside it.
struct SceneGeometry {
    Vec3 room_min, room_max;
    std::vector<Primitive> objects;
};

enum class Trajectory { kOrbit, kRandomPoses };

struct SyntheticSceneSpec {
    double room_w = 6.0, room_d = 5.0, room_h = 3.0;  // meters
    int object_count = 3;
    Trajectory trajectory = Trajectory::kOrbit;
    int frame_count = 16;
    int width = 112, height = 84;
    int patch_size_2d = 28;
    double focal = 0.0;  // pixels; 0 picks width (about 53 degrees horizontal)
    uint64_t seed = 0;
    int feat2d_dim = 8;
    int feat3d_dim = 6;
};

struct SyntheticScene {
    SceneManifest manifest;
    SceneGeometry geometry;
    std::vector<DepthMap> depths;
    std::vector<SegmentationMap> segs;
};

// World-to-camera pose looking from `pos` toward `target` with +z up;
// camera convention is x right, y down, z forward.
CameraExtrinsics look_at(Vec3 pos, Vec3 target);

struct RayHit {
    double depth = 0.0;  // camera-space z of the hit
    uint16_t label = 0;
};

// Casts the pixel-center ray. dir_world must be the world direction of the
// camera ray scaled so the parameter equals camera depth (i.e. the image of
// ((u-cx)/fx, (v-cy)/fy, 1)). The room shell guarantees a hit.
RayHit cast_ray(const SceneGeometry& geo, Vec3 origin, Vec3 dir_world);

// Analytic depth + labels for a full view.
void render_ground_truth(const SceneGeometry& geo, const CameraIntrinsics& intr,
                         const CameraExtrinsics& extr, DepthMap* depth,
                         SegmentationMap* seg);

// Builds the whole scene in memory. Throws on invalid specs (camera outside
// the room, dims not divisible by the patch size).
SyntheticScene generate_scene(const SyntheticSceneSpec& spec, int threads = 1);

// Writes scene.json, depth/NNNN.rgd, seg/NNNN.rgs and seeded random
// feat/2d.rgf, feat/3d.rgf, feat/projector.rgw under dir.
void write_scene(const SyntheticScene& scene, const SyntheticSceneSpec& spec,
                 const std::string& dir);

}  // namespace reg3d
