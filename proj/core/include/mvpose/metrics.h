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

// Accuracy (per-joint position error) and latency aggregation. All reported
// lengths are millimeters and durations milliseconds; spreads are population
// standard deviations.

#ifndef MVPOSE_METRICS_H_
#define MVPOSE_METRICS_H_

#include <map>
#include <string>
#include <vector>

#include "mvpose/fusion.h"
#include "mvpose/simulator.h"
#include "mvpose/skeleton.h"
#include "mvpose/weights.h"

namespace mvpose {

struct JointError {
  double mean_mm = 0.0;
  double std_mm = 0.0;
  std::size_t frames = 0;
};

struct MpjpeReport {
  JointMap<JointError> joints;  // joints never estimated are absent
  double overall_mm = 0.0;      // mean of the present per-joint means; NaN if none
  std::size_t matched_frames = 0;
};

// Pairs each estimate with the ground-truth frame nearest in time, if within
// `tolerance` seconds. Throws NoMatches when nothing pairs.
MpjpeReport mpjpe(const std::vector<Skeleton3D>& estimated,
                  const std::vector<GroundTruthFrame>& truth, double tolerance);

struct AblationRow {
  WeightMode mode = WeightMode::kAll;
  MpjpeReport report;
};

struct AblationTable {
  std::vector<AblationRow> rows;
  const AblationRow* find(WeightMode m) const;
};

// Generates and renders `scene` once, then triangulates the same detections
// under every mode (other parameters from `base`).
AblationTable ablation_report(const SceneConfig& scene, const Rig& rig,
                              const std::vector<WeightMode>& modes,
                              const WeightParams& base = WeightParams{});

// joint,mode,mean_mm,std_mm,frames, preceded by a '#' line stating the
// conventions. Per-joint rows in canonical joint order, then one "Average"
// row per mode.
std::string mpjpe_csv(const AblationTable& table);
std::string mpjpe_csv(const MpjpeReport& report, const std::string& label);

struct CameraLatency {
  double mean_ingest_ms = 0.0;
  double std_ingest_ms = 0.0;
  double mean_output_ms = 0.0;
  double std_output_ms = 0.0;
  std::size_t samples = 0;
};

struct LatencyReport {
  std::map<CameraId, CameraLatency> cameras;
  double mean_tick_cost_ms = 0.0;
  double achieved_rate_hz = 0.0;  // (outputs - 1) / span
  double configured_rate_hz = 0.0;
};

// Throws InvalidArgument when both inputs are empty.
LatencyReport latency_report(const std::vector<LatencyRecord>& records,
                             const std::vector<double>& output_times, const FusionConfig& cfg,
                             const std::vector<double>& tick_costs = {});

// camera,mean_ingest_ms,std_ingest_ms,mean_output_ms,std_output_ms
std::string latency_csv(const LatencyReport& report);

}  // namespace mvpose

#endif  // MVPOSE_METRICS_H_
