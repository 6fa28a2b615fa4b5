#pragma once

// Core scene types shared by every module. All geometry is carried in
// double precision; binary files store float32 (see io.hpp). Types are
// plain aggregates, immutable by convention once constructed.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reg3d {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) { return (1.0 / norm(v)) * v; }

// Row-major 3x3 matrix.
struct Mat3 {
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }

    Vec3 operator*(Vec3 v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 transposed() const {
        return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }
};

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;   // focal lengths, pixels
    double cx = 0.0, cy = 0.0;   // principal point, pixels
    int width = 0, height = 0;   // image dims, pixels
};

// World-to-camera pose: p_cam = rotation * p_world + translation.
struct CameraExtrinsics {
    Mat3 rotation;
    Vec3 translation;
};

// Max |R^T R - I| entry and |det(R) - 1| allowed for a valid rotation.
inline constexpr double kRotationTolerance = 1e-6;

bool is_rotation(const Mat3& r, double tol = kRotationTolerance);

struct Frame {
    int frame_id = 0;
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
    std::optional<std::string> depth_ref;
    std::optional<std::string> seg_ref;
    std::optional<std::string> feat2d_ref;
    std::optional<std::string> feat3d_ref;
};

struct SceneManifest {
    std::vector<Frame> frames;
    int patch_size_2d = 28;  // fused-token grid; must be 2 * patch_size_3d
    int patch_size_3d = 14;
};

// Per-pixel metric depth, row-major. Invalid pixels hold a non-finite value.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<double> values;

    double at(int row, int col) const { return values[size_t(row) * width + col]; }
    double& at(int row, int col) { return values[size_t(row) * width + col]; }

    static DepthMap filled(int width, int height, double v) {
        DepthMap d;
        d.width = width;
        d.height = height;
        d.values.assign(size_t(width) * height, v);
        return d;
    }
};

// Per-pixel instance labels, row-major.
struct SegmentationMap {
    int width = 0, height = 0;
    std::vector<uint16_t> labels;
    std::vector<uint16_t> background_labels;

    uint16_t at(int row, int col) const { return labels[size_t(row) * width + col]; }
    bool is_background(uint16_t label) const;
};

// Merged world-space points, structure-of-arrays so the projection kernels
// can stream them. Point id == index; ids stay contiguous from 0.
struct PointCloud {
    std::vector<double> xs, ys, zs;

    size_t size() const { return xs.size(); }
    bool empty() const { return xs.empty(); }
    Vec3 point(size_t i) const { return {xs[i], ys[i], zs[i]}; }

    void push_back(Vec3 p) {
        xs.push_back(p.x);
        ys.push_back(p.y);
        zs.push_back(p.z);
    }
    void reserve(size_t n) {
        xs.reserve(n);
        ys.reserve(n);
        zs.reserve(n);
    }
    void append(const PointCloud& other) {
        xs.insert(xs.end(), other.xs.begin(), other.xs.end());
        ys.insert(ys.end(), other.ys.begin(), other.ys.end());
        zs.insert(zs.end(), other.zs.begin(), other.zs.end());
    }
};

// Patchified feature map, layout [frame][patch_row][patch_col][dim].
struct FeatureGrid {
    int n_frames = 0, patches_h = 0, patches_w = 0, dim = 0;
    std::vector<double> data;

    size_t patch_count() const { return size_t(n_frames) * patches_h * patches_w; }
    size_t offset(int frame, int row, int col) const {
        return ((size_t(frame) * patches_h + row) * patches_w + col) * dim;
    }
    const double* patch(int frame, int row, int col) const {
        return data.data() + offset(frame, row, col);
    }
    double* patch(int frame, int row, int col) {
        return data.data() + offset(frame, row, col);
    }
    bool same_shape(const FeatureGrid& o) const {
        return n_frames == o.n_frames && patches_h == o.patches_h &&
               patches_w == o.patches_w && dim == o.dim;
    }

    static FeatureGrid zeros(int n_frames, int patches_h, int patches_w, int dim) {
        FeatureGrid g;
        g.n_frames = n_frames;
        g.patches_h = patches_h;
        g.patches_w = patches_w;
        g.dim = dim;
        g.data.assign(size_t(n_frames) * patches_h * patches_w * dim, 0.0);
        return g;
    }
};

struct Violation {
    std::string code;     // short stable tag, e.g. "patch ratio"
    std::string message;  // human-readable detail
};

// Checks every type invariant across the scene, including headers of
// referenced files when base_dir is given. Unreadable files become "io"
// violations instead of aborting the scan.
std::vector<Violation> validate_scene(const SceneManifest& manifest,
                                      const std::string& base_dir = "");

}  // namespace reg3d
