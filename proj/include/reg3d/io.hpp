#pragma once

// Readers and writers for every on-disk artifact. Binary formats are
// little-endian with float32 payloads; the documented layouts are:
//
//   .rgd  "RGD1" | u32 width | u32 height | f32 depth[h*w] row-major, meters
//   .rgs  "RGS1" | u32 width | u32 height | u16 labels[h*w] row-major
//   .rgf  "RGF1" | u32 n_frames | u32 patches_h | u32 patches_w | u32 dim
//                | f32 data[n*h*w*dim] row-major
//   .rgm  "RGM1" | u32 n_frames | u32 patches_h | u32 patches_w
//                | patch bits packed LSB-first, frame-major row-major
//   .rgw  "RGW1" | u32 rows | u32 cols | u8 has_bias
//                | f32 matrix[rows*cols] row-major | f32 bias[cols]
//
// scene.json and the report files are UTF-8 JSON. write->read->write
// reproduces every format byte for byte.

#include "reg3d/coverage.hpp"
#include "reg3d/losses.hpp"
#include "reg3d/masking.hpp"
#include "reg3d/scene.hpp"

#include <string>
#include <vector>

namespace reg3d::io {

DepthMap read_depth(const std::string& path);
void write_depth(const std::string& path, const DepthMap& depth);

SegmentationMap read_segmentation(const std::string& path);
void write_segmentation(const std::string& path, const SegmentationMap& seg);

FeatureGrid read_features(const std::string& path);
void write_features(const std::string& path, const FeatureGrid& grid);

PatchMask read_mask(const std::string& path);
void write_mask(const std::string& path, const PatchMask& mask);

ProjectorWeights read_projector(const std::string& path);
void write_projector(const std::string& path, const ProjectorWeights& w);

SceneManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const SceneManifest& manifest);

SelectionReport read_selection(const std::string& path);
void write_selection(const std::string& path, const SelectionReport& report);

FrameMask read_frame_mask(const std::string& path);
void write_frame_mask(const std::string& path, const FrameMask& mask);

void write_loss_report(const std::string& path, const LossReport& report);

// Object records travel as a sidecar JSON next to the .rgm file.
std::vector<ObjectRecord> read_object_records(const std::string& path);
void write_object_records(const std::string& path,
                          const std::vector<ObjectRecord>& records);

}  // namespace reg3d::io
