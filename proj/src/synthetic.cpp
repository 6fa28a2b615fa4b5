#include "reg3d/synthetic.hpp"

#include "reg3d/io.hpp"
#include "reg3d/losses.hpp"
#include "reg3d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

namespace reg3d {
namespace {

constexpr double kRayEps = 1e-9;
constexpr double kPi = 3.14159265358979323846;

double uniform01(MaskRng& rng) {
    return double(rng.next() >> 11) * 0x1.0p-53;
}

double uniform(MaskRng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Exit parameter of a ray starting inside an AABB.
double exit_box(Vec3 min, Vec3 max, Vec3 o, Vec3 d) {
    double t = std::numeric_limits<double>::infinity();
    const double od[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    const double mn[3] = {min.x, min.y, min.z};
    const double mx[3] = {max.x, max.y, max.z};
    for (int a = 0; a < 3; ++a) {
        if (dd[a] > 0.0)
            t = std::min(t, (mx[a] - od[a]) / dd[a]);
        else if (dd[a] < 0.0)
            t = std::min(t, (mn[a] - od[a]) / dd[a]);
    }
    return t;
}

// Entry parameter for a ray vs AABB; +inf on miss.
double hit_box(Vec3 min, Vec3 max, Vec3 o, Vec3 d) {
    double tn = -std::numeric_limits<double>::infinity();
    double tf = std::numeric_limits<double>::infinity();
    const double od[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    const double mn[3] = {min.x, min.y, min.z};
    const double mx[3] = {max.x, max.y, max.z};
    for (int a = 0; a < 3; ++a) {
        if (dd[a] == 0.0) {
            if (od[a] < mn[a] || od[a] > mx[a])
                return std::numeric_limits<double>::infinity();
            continue;
        }
        double t0 = (mn[a] - od[a]) / dd[a];
        double t1 = (mx[a] - od[a]) / dd[a];
        if (t0 > t1) std::swap(t0, t1);
        tn = std::max(tn, t0);
        tf = std::min(tf, t1);
    }
    if (tn > tf || tf <= kRayEps) return std::numeric_limits<double>::infinity();
    return tn > kRayEps ? tn : tf;
}

double hit_sphere(Vec3 center, double radius, Vec3 o, Vec3 d) {
    Vec3 oc = o - center;
    double a = dot(d, d);
    double b = 2.0 * dot(oc, d);
    double c = dot(oc, oc) - radius * radius;
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    double sq = std::sqrt(disc);
    double t0 = (-b - sq) / (2.0 * a);
    double t1 = (-b + sq) / (2.0 * a);
    if (t0 > kRayEps) return t0;
    if (t1 > kRayEps) return t1;
    return std::numeric_limits<double>::infinity();
}

FeatureGrid random_grid(int n_frames, int ph, int pw, int dim, MaskRng& rng) {
    FeatureGrid g = FeatureGrid::zeros(n_frames, ph, pw, dim);
    for (double& v : g.data) v = uniform(rng, -1.0, 1.0);
    return g;
}

}  // namespace

CameraExtrinsics look_at(Vec3 pos, Vec3 target) {
    Vec3 forward = normalized(target - pos);
    Vec3 up{0.0, 0.0, 1.0};
    if (std::abs(dot(forward, up)) > 0.999)
        throw std::invalid_argument("look_at: forward too close to vertical");
    Vec3 right = normalized(cross(forward, up));
    Vec3 down = cross(forward, right);
    CameraExtrinsics ex;
    ex.rotation = {{right.x, right.y, right.z,  //
                    down.x, down.y, down.z,     //
                    forward.x, forward.y, forward.z}};
    Vec3 t = ex.rotation * pos;
    ex.translation = {-t.x, -t.y, -t.z};
    return ex;
}

RayHit cast_ray(const SceneGeometry& geo, Vec3 origin, Vec3 dir_world) {
    RayHit hit;
    hit.depth = exit_box(geo.room_min, geo.room_max, origin, dir_world);
    hit.label = 0;
    for (const Primitive& p : geo.objects) {
        double t = p.kind == Primitive::Kind::kBox
                       ? hit_box(p.box_min, p.box_max, origin, dir_world)
                       : hit_sphere(p.center, p.radius, origin, dir_world);
        if (t < hit.depth) {
            hit.depth = t;
            hit.label = p.label;
        }
    }
    return hit;
}

void render_ground_truth(const SceneGeometry& geo, const CameraIntrinsics& intr,
                         const CameraExtrinsics& extr, DepthMap* depth,
                         SegmentationMap* seg) {
    Mat3 rt = extr.rotation.transposed();
    Vec3 origin = rt * (Vec3{0, 0, 0} - extr.translation);
    if (depth) {
        depth->width = intr.width;
        depth->height = intr.height;
        depth->values.resize(size_t(intr.width) * intr.height);
    }
    if (seg) {
        seg->width = intr.width;
        seg->height = intr.height;
        seg->labels.resize(size_t(intr.width) * intr.height);
        seg->background_labels = {0};
    }
    for (int r = 0; r < intr.height; ++r) {
        for (int c = 0; c < intr.width; ++c) {
            // parameter along this direction equals camera-space depth
            Vec3 dir_cam{((c + 0.5) - intr.cx) / intr.fx,
                         ((r + 0.5) - intr.cy) / intr.fy, 1.0};
            RayHit hit = cast_ray(geo, origin, rt * dir_cam);
            size_t idx = size_t(r) * intr.width + c;
            if (depth) depth->values[idx] = hit.depth;
            if (seg) seg->labels[idx] = hit.label;
        }
    }
}

SyntheticScene generate_scene(const SyntheticSceneSpec& spec, int threads) {
    if (spec.frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
    if (spec.width <= 0 || spec.height <= 0 || spec.patch_size_2d <= 0 ||
        spec.width % spec.patch_size_2d != 0 || spec.height % spec.patch_size_2d != 0)
        throw std::invalid_argument(
            "image dims must be positive and divisible by patch_size_2d");
    if (spec.room_w <= 0.5 || spec.room_d <= 0.5 || spec.room_h <= 0.5)
        throw std::invalid_argument("room too small");

    MaskRng rng(spec.seed);
    SyntheticScene scene;
    scene.geometry.room_min = {-spec.room_w / 2.0, -spec.room_d / 2.0, 0.0};
    scene.geometry.room_max = {spec.room_w / 2.0, spec.room_d / 2.0, spec.room_h};

    // Objects live in a central cylinder, cameras on a wider ring, so poses
    // never start inside an object.
    double footprint = std::min(spec.room_w, spec.room_d);
    double obj_radius = 0.25 * footprint;
    for (int i = 0; i < spec.object_count; ++i) {
        Primitive p;
        p.label = uint16_t(i + 1);
        double ang = uniform(rng, 0.0, 2.0 * kPi);
        double rad = obj_radius * std::sqrt(uniform01(rng));
        Vec3 base{rad * std::cos(ang), rad * std::sin(ang), 0.0};
        if (rng.next_below(2) == 0) {
            p.kind = Primitive::Kind::kBox;
            Vec3 half{uniform(rng, 0.15, 0.45), uniform(rng, 0.15, 0.45),
                      uniform(rng, 0.15, 0.45)};
            double zc = uniform(rng, half.z, 0.6 * spec.room_h);
            Vec3 center{base.x, base.y, zc};
            p.box_min = center - half;
            p.box_max = center + half;
        } else {
            p.kind = Primitive::Kind::kSphere;
            p.radius = uniform(rng, 0.15, 0.5);
            p.center = {base.x, base.y, uniform(rng, p.radius, 0.6 * spec.room_h)};
        }
        scene.geometry.objects.push_back(p);
    }

    CameraIntrinsics intr;
    intr.width = spec.width;
    intr.height = spec.height;
    intr.fx = intr.fy = spec.focal > 0.0 ? spec.focal : double(spec.width);
    intr.cx = spec.width / 2.0;
    intr.cy = spec.height / 2.0;

    double cam_ring = 0.42 * footprint;
    double cam_height = 0.5 * spec.room_h;
    for (int i = 0; i < spec.frame_count; ++i) {
        Vec3 pos;
        Vec3 target;
        if (spec.trajectory == Trajectory::kOrbit) {
            double ang = 2.0 * kPi * i / spec.frame_count;
            pos = {cam_ring * std::cos(ang), cam_ring * std::sin(ang), cam_height};
            target = {0.0, 0.0, 0.45 * spec.room_h};
        } else {
            pos = {uniform(rng, -0.35, 0.35) * spec.room_w,
                   uniform(rng, -0.35, 0.35) * spec.room_d,
                   uniform(rng, 0.3, 0.7) * spec.room_h};
            double yaw = uniform(rng, 0.0, 2.0 * kPi);
            double pitch = uniform(rng, -0.2, 0.2);
            target = pos + Vec3{std::cos(yaw) * std::cos(pitch),
                                std::sin(yaw) * std::cos(pitch), std::sin(pitch)};
        }
        if (pos.x <= scene.geometry.room_min.x || pos.x >= scene.geometry.room_max.x ||
            pos.y <= scene.geometry.room_min.y || pos.y >= scene.geometry.room_max.y ||
            pos.z <= scene.geometry.room_min.z || pos.z >= scene.geometry.room_max.z)
            throw std::invalid_argument("generate_scene: camera outside room");

        Frame f;
        f.frame_id = i;
        f.intrinsics = intr;
        f.extrinsics = look_at(pos, target);
        scene.manifest.frames.push_back(f);
    }
    scene.manifest.patch_size_2d = spec.patch_size_2d;
    scene.manifest.patch_size_3d = spec.patch_size_2d / 2;
    if (scene.manifest.patch_size_3d * 2 != spec.patch_size_2d)
        throw std::invalid_argument("patch_size_2d must be even");

    scene.depths.resize(spec.frame_count);
    scene.segs.resize(spec.frame_count);
    parallel_for(size_t(spec.frame_count), threads, [&](size_t i) {
        render_ground_truth(scene.geometry, scene.manifest.frames[i].intrinsics,
                            scene.manifest.frames[i].extrinsics, &scene.depths[i],
                            &scene.segs[i]);
    });
    return scene;
}

void write_scene(const SyntheticScene& scene, const SyntheticSceneSpec& spec,
                 const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "depth");
    fs::create_directories(fs::path(dir) / "seg");
    fs::create_directories(fs::path(dir) / "feat");
    fs::create_directories(fs::path(dir) / "masks");

    SceneManifest manifest = scene.manifest;
    char name[32];
    for (size_t i = 0; i < manifest.frames.size(); ++i) {
        std::snprintf(name, sizeof name, "depth/%04zu.rgd", i);
        manifest.frames[i].depth_ref = name;
        io::write_depth((fs::path(dir) / name).string(), scene.depths[i]);
        std::snprintf(name, sizeof name, "seg/%04zu.rgs", i);
        manifest.frames[i].seg_ref = name;
        io::write_segmentation((fs::path(dir) / name).string(), scene.segs[i]);
        manifest.frames[i].feat2d_ref = "feat/2d.rgf";
        manifest.frames[i].feat3d_ref = "feat/3d.rgf";
    }

    // Feature grids and projector weights are seeded stand-ins for encoder
    // exports; real exports use the same formats.
    MaskRng rng(spec.seed ^ 0xFEA70000u);
    int n = int(manifest.frames.size());
    int p2 = manifest.patch_size_2d, p3 = manifest.patch_size_3d;
    FeatureGrid f2d = random_grid(n, spec.height / p2, spec.width / p2,
                                  spec.feat2d_dim, rng);
    FeatureGrid f3d = random_grid(n, spec.height / p3, spec.width / p3,
                                  spec.feat3d_dim, rng);
    ProjectorWeights w;
    w.rows = 4 * spec.feat3d_dim;
    w.cols = spec.feat2d_dim;
    w.matrix.resize(size_t(w.rows) * w.cols);
    for (double& v : w.matrix) v = uniform(rng, -0.5, 0.5);
    w.bias.resize(size_t(w.cols));
    for (double& v : w.bias) v = uniform(rng, -0.1, 0.1);

    io::write_features((fs::path(dir) / "feat/2d.rgf").string(), f2d);
    io::write_features((fs::path(dir) / "feat/3d.rgf").string(), f3d);
    io::write_projector((fs::path(dir) / "feat/projector.rgw").string(), w);
    io::write_manifest((fs::path(dir) / "scene.json").string(), manifest);
}

}  // namespace reg3d
