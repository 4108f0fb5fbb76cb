// Copyright 2026 The mvpose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats.
//
// Rig (JSON): array of
//   {"id": 0, "intrinsics": {"fx","fy","cx","cy","width","height"},
//    "extrinsics": {"rotation": [9 numbers, row-major], "translation": [3]}}
// with the camera-to-world pose in meters.
//
// 2D skeleton stream (JSON Lines), one view per line:
//   {"t": 0.033, "camera": 2, "joints": {"Neck": {"u":..,"v":..,"score":..}, ...}}
// 3D skeleton stream (JSON Lines):
//   {"t": 0.033, "joints": {"Neck": {"x","y","z","residual","cameras_used"}, ...}}
// Joints are written in canonical order.
//
// Per-frame latency (CSV): camera_id,capture_to_ingest_s,ingest_to_output_s
//
// Parsers throw ParseError (with a byte offset for syntax errors); file
// helpers throw IoError.

#ifndef MVPOSE_IO_H_
#define MVPOSE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mvpose/fusion.h"
#include "mvpose/geometry.h"
#include "mvpose/metrics.h"
#include "mvpose/simulator.h"
#include "mvpose/skeleton.h"
#include "mvpose/weights.h"

namespace mvpose::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

Rig parse_rig(std::string_view text);
std::string rig_to_json(const Rig& rig);

SceneConfig parse_scene_config(std::string_view text);
std::string scene_config_to_json(const SceneConfig& cfg);

// {"s_th":0.4, "d_min":1.0, "d_max":4.0, "weight_mode":"all",
//  "use_distance":true, "use_orthogonality":true}; missing keys keep `base`.
WeightParams parse_weight_params(std::string_view text, const WeightParams& base = {});
std::string weight_params_to_json(const WeightParams& p);

std::string skeleton2d_to_json(const Skeleton2D& sk);
Skeleton2D parse_skeleton2d(std::string_view line);
std::string skeleton3d_to_json(const Skeleton3D& sk);
Skeleton3D parse_skeleton3d(std::string_view line);

// Blank lines are skipped; byte offsets in errors are relative to `text`.
std::vector<Skeleton2D> parse_skeleton2d_stream(std::string_view text);
std::vector<Skeleton3D> parse_skeleton3d_stream(std::string_view text);
std::string skeleton2d_stream(const std::vector<Skeleton2D>& views);
std::string skeleton3d_stream(const std::vector<Skeleton3D>& skeletons);

std::string ground_truth_stream(const std::vector<GroundTruthFrame>& frames);
// Every line must carry all 14 joints.
std::vector<GroundTruthFrame> parse_ground_truth_stream(std::string_view text);

std::string latency_records_csv_header();
std::string latency_records_csv(const std::vector<LatencyRecord>& records);

std::string mpjpe_json(const MpjpeReport& report, const std::string& label);
std::string ablation_json(const AblationTable& table);
std::string latency_json(const LatencyReport& report);

}  // namespace mvpose::io

#endif  // MVPOSE_IO_H_
