#include "reg3d/scene.hpp"

#include "reg3d/io.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

namespace reg3d {
namespace {

std::string frame_tag(const Frame& f) {
    return "frame " + std::to_string(f.frame_id);
}

}  // namespace

bool SegmentationMap::is_background(uint16_t label) const {
    return std::find(background_labels.begin(), background_labels.end(), label) !=
           background_labels.end();
}

bool is_rotation(const Mat3& r, double tol) {
    Mat3 rt = r.transposed();
    // R^T R - I, max entry
    double max_dev = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double dotv = rt.m[i * 3 + 0] * r.m[0 * 3 + j] +
                          rt.m[i * 3 + 1] * r.m[1 * 3 + j] +
                          rt.m[i * 3 + 2] * r.m[2 * 3 + j];
            max_dev = std::max(max_dev, std::abs(dotv - (i == j ? 1.0 : 0.0)));
        }
    }
    const double* m = r.m;
    double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                 m[1] * (m[3] * m[8] - m[5] * m[6]) +
                 m[2] * (m[3] * m[7] - m[4] * m[6]);
    return max_dev <= tol && std::abs(det - 1.0) <= tol;
}

std::vector<Violation> validate_scene(const SceneManifest& manifest,
                                      const std::string& base_dir) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string msg) {
        out.push_back({std::move(code), std::move(msg)});
    };

    if (manifest.frames.empty()) add("empty scene", "manifest has no frames");
    if (manifest.patch_size_2d != 2 * manifest.patch_size_3d) {
        add("patch ratio", "patch_size_2d must equal 2 * patch_size_3d, got " +
                               std::to_string(manifest.patch_size_2d) + " vs " +
                               std::to_string(manifest.patch_size_3d));
    }
    if (manifest.patch_size_3d <= 0) add("patch size", "patch sizes must be positive");

    std::set<int> seen_ids;
    for (const Frame& f : manifest.frames) {
        if (!seen_ids.insert(f.frame_id).second)
            add("duplicate frame id", frame_tag(f) + " appears more than once");

        const CameraIntrinsics& in = f.intrinsics;
        if (!(in.fx > 0.0) || !(in.fy > 0.0))
            add("focal length", frame_tag(f) + ": fx and fy must be positive");
        if (!(in.cx >= 0.0 && in.cx < in.width) || !(in.cy >= 0.0 && in.cy < in.height))
            add("principal point", frame_tag(f) + ": (cx, cy) must lie inside the image");
        if (in.width <= 0 || in.height <= 0)
            add("image dims", frame_tag(f) + ": non-positive image dimensions");
        if (manifest.patch_size_2d > 0 &&
            (in.width % manifest.patch_size_2d != 0 ||
             in.height % manifest.patch_size_2d != 0)) {
            add("patch divisibility",
                frame_tag(f) + ": image dims not divisible by patch_size_2d");
        }
        if (!is_rotation(f.extrinsics.rotation))
            add("rotation", frame_tag(f) + ": rotation is not orthonormal with det 1");

        if (base_dir.empty()) continue;
        auto resolve = [&](const std::string& ref) {
            return (std::filesystem::path(base_dir) / ref).string();
        };
        if (f.depth_ref) {
            try {
                DepthMap d = io::read_depth(resolve(*f.depth_ref));
                if (d.width != in.width || d.height != in.height)
                    add("depth dims", frame_tag(f) + ": depth file dims mismatch");
                for (double v : d.values) {
                    if (std::isfinite(v) && !(v > 0.0)) {
                        add("depth range", frame_tag(f) + ": non-positive finite depth");
                        break;
                    }
                }
            } catch (const std::exception& e) {
                add("io", frame_tag(f) + ": " + e.what());
            }
        }
        if (f.seg_ref) {
            try {
                SegmentationMap s = io::read_segmentation(resolve(*f.seg_ref));
                if (s.width != in.width || s.height != in.height)
                    add("seg dims", frame_tag(f) + ": segmentation file dims mismatch");
            } catch (const std::exception& e) {
                add("io", frame_tag(f) + ": " + e.what());
            }
        }
        auto check_feat = [&](const std::string& ref, int patch, const char* what) {
            try {
                FeatureGrid g = io::read_features(resolve(ref));
                if (g.n_frames != int(manifest.frames.size()) ||
                    g.patches_h != in.height / patch || g.patches_w != in.width / patch)
                    add("feature dims",
                        frame_tag(f) + ": " + what + " grid dims mismatch");
                for (double v : g.data) {
                    if (!std::isfinite(v)) {
                        add("feature range", frame_tag(f) + ": non-finite feature value");
                        break;
                    }
                }
            } catch (const std::exception& e) {
                add("io", frame_tag(f) + ": " + e.what());
            }
        };
        if (f.feat2d_ref) check_feat(*f.feat2d_ref, manifest.patch_size_2d, "2d feature");
        if (f.feat3d_ref) check_feat(*f.feat3d_ref, manifest.patch_size_3d, "3d feature");
    }
    return out;
}

}  // namespace reg3d
