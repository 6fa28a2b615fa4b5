#include "reg3d/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace reg3d::io {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; add byte swapping for this target");

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) fail(path, "read error");
    return bytes;
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out.good()) fail(path, "write error");
}

class Reader {
public:
    Reader(std::string path, std::string bytes)
        : path_(std::move(path)), bytes_(std::move(bytes)) {}

    void expect_magic(const char (&magic)[5]) {
        if (bytes_.size() < 4 || std::memcmp(bytes_.data(), magic, 4) != 0)
            fail(path_, std::string("bad magic, expected ") + magic);
        pos_ = 4;
    }
    uint32_t u32() {
        uint32_t v;
        take(&v, sizeof v);
        return v;
    }
    uint16_t u16() {
        uint16_t v;
        take(&v, sizeof v);
        return v;
    }
    uint8_t u8() {
        uint8_t v;
        take(&v, sizeof v);
        return v;
    }
    float f32() {
        float v;
        take(&v, sizeof v);
        return v;
    }
    template <typename T>
    void array(T* dst, size_t count) {
        take(dst, count * sizeof(T));
    }
    void done() {
        if (pos_ != bytes_.size()) fail(path_, "trailing bytes");
    }

private:
    void take(void* dst, size_t n) {
        if (bytes_.size() - pos_ < n) fail(path_, "truncated file");
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::string path_;
    std::string bytes_;
    size_t pos_ = 0;
};

class Writer {
public:
    void magic(const char (&m)[5]) { buf_.append(m, 4); }
    void u32(uint32_t v) { put(&v, sizeof v); }
    void u16(uint16_t v) { put(&v, sizeof v); }
    void u8(uint8_t v) { put(&v, sizeof v); }
    void f32(float v) { put(&v, sizeof v); }
    template <typename T>
    void array(const T* src, size_t count) {
        put(src, count * sizeof(T));
    }
    const std::string& bytes() const { return buf_; }

private:
    void put(const void* src, size_t n) {
        buf_.append(static_cast<const char*>(src), n);
    }
    std::string buf_;
};

uint32_t checked_dim(const std::string& path, uint32_t v, const char* what) {
    if (v == 0 || v > (1u << 20)) fail(path, std::string("unreasonable ") + what);
    return v;
}

json json_from_file(const std::string& path) {
    std::string text = read_all(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(path, "invalid JSON");
    return j;
}

void json_to_file(const std::string& path, const json& j) {
    write_all(path, j.dump(2) + "\n");
}

}  // namespace

DepthMap read_depth(const std::string& path) {
    Reader r(path, read_all(path));
    r.expect_magic("RGD1");
    DepthMap d;
    d.width = int(checked_dim(path, r.u32(), "width"));
    d.height = int(checked_dim(path, r.u32(), "height"));
    size_t n = size_t(d.width) * d.height;
    std::vector<float> raw(n);
    r.array(raw.data(), n);
    r.done();
    d.values.assign(raw.begin(), raw.end());
    return d;
}

void write_depth(const std::string& path, const DepthMap& depth) {
    Writer w;
    w.magic("RGD1");
    w.u32(uint32_t(depth.width));
    w.u32(uint32_t(depth.height));
    for (double v : depth.values) w.f32(float(v));
    write_all(path, w.bytes());
}

SegmentationMap read_segmentation(const std::string& path) {
    Reader r(path, read_all(path));
    r.expect_magic("RGS1");
    SegmentationMap s;
    s.width = int(checked_dim(path, r.u32(), "width"));
    s.height = int(checked_dim(path, r.u32(), "height"));
    s.labels.resize(size_t(s.width) * s.height);
    r.array(s.labels.data(), s.labels.size());
    r.done();
    return s;
}

void write_segmentation(const std::string& path, const SegmentationMap& seg) {
    Writer w;
    w.magic("RGS1");
    w.u32(uint32_t(seg.width));
    w.u32(uint32_t(seg.height));
    w.array(seg.labels.data(), seg.labels.size());
    write_all(path, w.bytes());
}

FeatureGrid read_features(const std::string& path) {
    Reader r(path, read_all(path));
    r.expect_magic("RGF1");
    FeatureGrid g;
    g.n_frames = int(checked_dim(path, r.u32(), "n_frames"));
    g.patches_h = int(checked_dim(path, r.u32(), "patches_h"));
    g.patches_w = int(checked_dim(path, r.u32(), "patches_w"));
    g.dim = int(checked_dim(path, r.u32(), "dim"));
    size_t n = size_t(g.n_frames) * g.patches_h * g.patches_w * g.dim;
    std::vector<float> raw(n);
    r.array(raw.data(), n);
    r.done();
    g.data.assign(raw.begin(), raw.end());
    return g;
}

void write_features(const std::string& path, const FeatureGrid& grid) {
    Writer w;
    w.magic("RGF1");
    w.u32(uint32_t(grid.n_frames));
    w.u32(uint32_t(grid.patches_h));
    w.u32(uint32_t(grid.patches_w));
    w.u32(uint32_t(grid.dim));
    for (double v : grid.data) w.f32(float(v));
    write_all(path, w.bytes());
}

PatchMask read_mask(const std::string& path) {
    Reader r(path, read_all(path));
    r.expect_magic("RGM1");
    PatchMask m;
    m.n_frames = int(checked_dim(path, r.u32(), "n_frames"));
    m.patches_h = int(checked_dim(path, r.u32(), "patches_h"));
    m.patches_w = int(checked_dim(path, r.u32(), "patches_w"));
    size_t n = size_t(m.n_frames) * m.patches_h * m.patches_w;
    std::vector<uint8_t> packed((n + 7) / 8);
    r.array(packed.data(), packed.size());
    r.done();
    m.bits.resize(n);
    for (size_t i = 0; i < n; ++i) m.bits[i] = (packed[i / 8] >> (i % 8)) & 1;
    return m;
}

void write_mask(const std::string& path, const PatchMask& mask) {
    Writer w;
    w.magic("RGM1");
    w.u32(uint32_t(mask.n_frames));
    w.u32(uint32_t(mask.patches_h));
    w.u32(uint32_t(mask.patches_w));
    std::vector<uint8_t> packed((mask.bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i]) packed[i / 8] |= uint8_t(1u << (i % 8));
    }
    w.array(packed.data(), packed.size());
    write_all(path, w.bytes());
}

ProjectorWeights read_projector(const std::string& path) {
    Reader r(path, read_all(path));
    r.expect_magic("RGW1");
    ProjectorWeights w;
    w.rows = int(checked_dim(path, r.u32(), "rows"));
    w.cols = int(checked_dim(path, r.u32(), "cols"));
    uint8_t has_bias = r.u8();
    std::vector<float> raw(size_t(w.rows) * w.cols);
    r.array(raw.data(), raw.size());
    w.matrix.assign(raw.begin(), raw.end());
    if (has_bias) {
        std::vector<float> braw(size_t(w.cols));
        r.array(braw.data(), braw.size());
        w.bias.assign(braw.begin(), braw.end());
    }
    r.done();
    return w;
}

void write_projector(const std::string& path, const ProjectorWeights& w) {
    Writer out;
    out.magic("RGW1");
    out.u32(uint32_t(w.rows));
    out.u32(uint32_t(w.cols));
    out.u8(w.bias.empty() ? 0 : 1);
    for (double v : w.matrix) out.f32(float(v));
    for (double v : w.bias) out.f32(float(v));
    write_all(path, out.bytes());
}

namespace {

json intrinsics_to_json(const CameraIntrinsics& in) {
    return json{{"fx", in.fx},       {"fy", in.fy},     {"cx", in.cx},
                {"cy", in.cy},       {"width", in.width}, {"height", in.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
    CameraIntrinsics in;
    in.fx = j.at("fx").get<double>();
    in.fy = j.at("fy").get<double>();
    in.cx = j.at("cx").get<double>();
    in.cy = j.at("cy").get<double>();
    in.width = j.at("width").get<int>();
    in.height = j.at("height").get<int>();
    return in;
}

json extrinsics_to_json(const CameraExtrinsics& ex) {
    json rot = json::array();
    for (double v : ex.rotation.m) rot.push_back(v);
    return json{{"rotation", rot},
                {"translation", {ex.translation.x, ex.translation.y, ex.translation.z}}};
}

CameraExtrinsics extrinsics_from_json(const json& j) {
    CameraExtrinsics ex;
    const json& rot = j.at("rotation");
    if (rot.size() != 9) throw std::runtime_error("rotation must have 9 entries");
    for (int i = 0; i < 9; ++i) ex.rotation.m[i] = rot[i].get<double>();
    const json& t = j.at("translation");
    if (t.size() != 3) throw std::runtime_error("translation must have 3 entries");
    ex.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    return ex;
}

}  // namespace

SceneManifest read_manifest(const std::string& path) {
    json j = json_from_file(path);
    SceneManifest m;
    try {
        m.patch_size_2d = j.at("patch_size_2d").get<int>();
        m.patch_size_3d = j.at("patch_size_3d").get<int>();
        for (const json& fj : j.at("frames")) {
            Frame f;
            f.frame_id = fj.at("frame_id").get<int>();
            f.intrinsics = intrinsics_from_json(fj.at("intrinsics"));
            f.extrinsics = extrinsics_from_json(fj.at("extrinsics"));
            if (fj.contains("depth_ref")) f.depth_ref = fj.at("depth_ref").get<std::string>();
            if (fj.contains("seg_ref")) f.seg_ref = fj.at("seg_ref").get<std::string>();
            if (fj.contains("feat2d_ref")) f.feat2d_ref = fj.at("feat2d_ref").get<std::string>();
            if (fj.contains("feat3d_ref")) f.feat3d_ref = fj.at("feat3d_ref").get<std::string>();
            m.frames.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        fail(path, e.what());
    }
    return m;
}

void write_manifest(const std::string& path, const SceneManifest& manifest) {
    json frames = json::array();
    for (const Frame& f : manifest.frames) {
        json fj{{"frame_id", f.frame_id},
                {"intrinsics", intrinsics_to_json(f.intrinsics)},
                {"extrinsics", extrinsics_to_json(f.extrinsics)}};
        if (f.depth_ref) fj["depth_ref"] = *f.depth_ref;
        if (f.seg_ref) fj["seg_ref"] = *f.seg_ref;
        if (f.feat2d_ref) fj["feat2d_ref"] = *f.feat2d_ref;
        if (f.feat3d_ref) fj["feat3d_ref"] = *f.feat3d_ref;
        frames.push_back(std::move(fj));
    }
    json_to_file(path, json{{"patch_size_2d", manifest.patch_size_2d},
                            {"patch_size_3d", manifest.patch_size_3d},
                            {"frames", frames}});
}

SelectionReport read_selection(const std::string& path) {
    json j = json_from_file(path);
    SelectionReport r;
    try {
        r.candidate_ids = j.at("candidate_ids").get<std::vector<int>>();
        r.selected_ids = j.at("selected_ids").get<std::vector<int>>();
        r.marginal_gains = j.at("marginal_gains").get<std::vector<uint64_t>>();
        r.total_points = j.at("total_points").get<uint64_t>();
        r.covered_points = j.at("covered_points").get<uint64_t>();
        r.uniform_baseline_covered = j.at("uniform_baseline_covered").get<uint64_t>();
        const json& c = j.at("config");
        r.config.total_frames = c.at("total_frames").get<int>();
        r.config.candidates = c.at("candidates").get<int>();
        r.config.select = c.at("select").get<int>();
        r.config.voxel_size = c.at("voxel_size").get<double>();
        r.config.render.splat_side_d = c.at("splat_side_d").get<double>();
        r.config.render.near_epsilon = c.at("near_epsilon").get<double>();
        r.config.seed = c.at("seed").get<uint64_t>();
    } catch (const json::exception& e) {
        fail(path, e.what());
    }
    return r;
}

void write_selection(const std::string& path, const SelectionReport& r) {
    json_to_file(path,
                 json{{"candidate_ids", r.candidate_ids},
                      {"selected_ids", r.selected_ids},
                      {"marginal_gains", r.marginal_gains},
                      {"total_points", r.total_points},
                      {"covered_points", r.covered_points},
                      {"uniform_baseline_covered", r.uniform_baseline_covered},
                      {"config",
                       {{"total_frames", r.config.total_frames},
                        {"candidates", r.config.candidates},
                        {"select", r.config.select},
                        {"voxel_size", r.config.voxel_size},
                        {"splat_side_d", r.config.render.splat_side_d},
                        {"near_epsilon", r.config.render.near_epsilon},
                        {"seed", r.config.seed}}}});
}

FrameMask read_frame_mask(const std::string& path) {
    json j = json_from_file(path);
    FrameMask m;
    try {
        m.n_frames = j.at("n_frames").get<int>();
        m.masked_views = j.at("masked_views").get<std::vector<int>>();
    } catch (const json::exception& e) {
        fail(path, e.what());
    }
    return m;
}

void write_frame_mask(const std::string& path, const FrameMask& mask) {
    json_to_file(path, json{{"n_frames", mask.n_frames},
                            {"masked_views", mask.masked_views}});
}

void write_loss_report(const std::string& path, const LossReport& r) {
    json_to_file(path, json{{"l_text", r.l_text},
                            {"l_object", r.l_object},
                            {"l_frame", r.l_frame},
                            {"l_total", r.l_total},
                            {"g_masked_patches", r.g_masked_patches},
                            {"k_masked_frames", r.k_masked_frames}});
}

std::vector<ObjectRecord> read_object_records(const std::string& path) {
    json j = json_from_file(path);
    std::vector<ObjectRecord> out;
    try {
        for (const json& rj : j.at("objects")) {
            ObjectRecord rec;
            rec.object_id = rj.at("object_id").get<uint16_t>();
            rec.kept_view = rj.at("kept_view").get<int>();
            for (const json& vj : rj.at("views")) {
                ViewOverlap v;
                v.view = vj.at("view").get<int>();
                for (const json& pj : vj.at("patches"))
                    v.patches.push_back({pj.at(0).get<int>(), pj.at(1).get<int>()});
                rec.views.push_back(std::move(v));
            }
            out.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        fail(path, e.what());
    }
    return out;
}

void write_object_records(const std::string& path,
                          const std::vector<ObjectRecord>& records) {
    json objects = json::array();
    for (const ObjectRecord& rec : records) {
        json views = json::array();
        for (const ViewOverlap& v : rec.views) {
            json patches = json::array();
            for (PatchCoord p : v.patches) patches.push_back({p.row, p.col});
            views.push_back(json{{"view", v.view},
                                 {"overlap_count", v.patches.size()},
                                 {"patches", patches}});
        }
        objects.push_back(json{{"object_id", rec.object_id},
                               {"kept_view", rec.kept_view},
                               {"views", views}});
    }
    json_to_file(path, json{{"objects", objects}});
}

}  // namespace reg3d::io
