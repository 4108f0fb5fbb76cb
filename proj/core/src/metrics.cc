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

#include "mvpose/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mvpose/error.h"
#include "mvpose/pipeline.h"
#include "mvpose/triangulator.h"

namespace mvpose {
namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments population_moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(sq / static_cast<double>(xs.size()));
  return m;
}

std::string fixed(double v, int digits = 6) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

constexpr const char* kCsvConventions =
    "# MPJPE in mm; std is the population standard deviation; "
    "Average is the mean of per-joint means\n";

void append_rows(std::string& out, const MpjpeReport& r, const std::string& label,
                 JointId j) {
  out += std::string(joint_name(j)) + "," + label + ",";
  if (const JointError* e = r.joints.find(j)) {
    out += fixed(e->mean_mm) + "," + fixed(e->std_mm) + "," + std::to_string(e->frames) + "\n";
  } else {
    out += ",,0\n";
  }
}

void append_average(std::string& out, const MpjpeReport& r, const std::string& label) {
  out += "Average," + label + "," + fixed(r.overall_mm) + ",," +
         std::to_string(r.matched_frames) + "\n";
}

}  // namespace

MpjpeReport mpjpe(const std::vector<Skeleton3D>& estimated,
                  const std::vector<GroundTruthFrame>& truth, double tolerance) {
  std::vector<const GroundTruthFrame*> sorted;
  sorted.reserve(truth.size());
  for (const auto& f : truth) sorted.push_back(&f);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });

  std::array<std::vector<double>, kJointCount> errors;
  MpjpeReport report;
  for (const Skeleton3D& est : estimated) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), est.timestamp,
                               [](const auto* f, double t) { return f->timestamp < t; });
    const GroundTruthFrame* best = nullptr;
    double best_dt = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) {
      best = *it;
      best_dt = std::abs((*it)->timestamp - est.timestamp);
    }
    if (it != sorted.begin()) {
      const GroundTruthFrame* prev = *(it - 1);
      const double dt = std::abs(prev->timestamp - est.timestamp);
      if (dt <= best_dt) {
        best = prev;
        best_dt = dt;
      }
    }
    if (!best || best_dt > tolerance) continue;
    ++report.matched_frames;
    est.joints.for_each([&](JointId j, const JointEstimate& e) {
      const Vec3 diff_mm = 1000.0 * (e.position - best->joints[index_of(j)]);
      errors[index_of(j)].push_back(diff_mm.norm());
    });
  }
  if (report.matched_frames == 0) {
    throw NoMatches("mpjpe: no estimate matched a ground-truth frame within tolerance");
  }

  double sum = 0.0;
  int present = 0;
  for (JointId j : kAllJoints) {
    const auto& xs = errors[index_of(j)];
    if (xs.empty()) continue;
    const Moments m = population_moments(xs);
    report.joints.set(j, JointError{m.mean, m.std, xs.size()});
    sum += m.mean;
    ++present;
  }
  report.overall_mm =
      present > 0 ? sum / present : std::numeric_limits<double>::quiet_NaN();
  return report;
}

const AblationRow* AblationTable::find(WeightMode m) const {
  for (const AblationRow& r : rows) {
    if (r.mode == m) return &r;
  }
  return nullptr;
}

AblationTable ablation_report(const SceneConfig& scene, const Rig& rig,
                              const std::vector<WeightMode>& modes, const WeightParams& base) {
  const std::vector<GroundTruthFrame> gt = generate_ground_truth(scene);
  const ViewStreams streams = render_detections(gt, rig, scene);
  const std::vector<FrameGroup> groups = group_by_timestamp(streams, 0.5 / scene.fps);

  AblationTable table;
  for (WeightMode mode : modes) {
    WeightParams params = base;
    params.weight_mode = mode;
    const std::vector<Skeleton3D> est = triangulate_sequence(groups, rig, params);
    table.rows.push_back(AblationRow{mode, mpjpe(est, gt, 0.5 / scene.fps)});
  }
  return table;
}

std::string mpjpe_csv(const AblationTable& table) {
  std::string out = kCsvConventions;
  out += "joint,mode,mean_mm,std_mm,frames\n";
  for (JointId j : kAllJoints) {
    for (const AblationRow& r : table.rows) {
      append_rows(out, r.report, std::string(weight_mode_name(r.mode)), j);
    }
  }
  for (const AblationRow& r : table.rows) {
    append_average(out, r.report, std::string(weight_mode_name(r.mode)));
  }
  return out;
}

std::string mpjpe_csv(const MpjpeReport& report, const std::string& label) {
  std::string out = kCsvConventions;
  out += "joint,mode,mean_mm,std_mm,frames\n";
  for (JointId j : kAllJoints) append_rows(out, report, label, j);
  append_average(out, report, label);
  return out;
}

LatencyReport latency_report(const std::vector<LatencyRecord>& records,
                             const std::vector<double>& output_times, const FusionConfig& cfg,
                             const std::vector<double>& tick_costs) {
  if (records.empty() && output_times.empty()) {
    throw InvalidArgument("latency_report: no records and no outputs");
  }
  LatencyReport report;
  report.configured_rate_hz = cfg.tick_rate;

  std::map<CameraId, std::pair<std::vector<double>, std::vector<double>>> per_camera;
  for (const LatencyRecord& r : records) {
    auto& [ingest, output] = per_camera[r.camera];
    ingest.push_back(1000.0 * r.capture_to_ingest);
    output.push_back(1000.0 * r.ingest_to_output);
  }
  for (const auto& [id, samples] : per_camera) {
    const Moments in = population_moments(samples.first);
    const Moments out = population_moments(samples.second);
    report.cameras[id] = CameraLatency{in.mean, in.std, out.mean, out.std, samples.first.size()};
  }

  if (!tick_costs.empty()) {
    std::vector<double> ms;
    ms.reserve(tick_costs.size());
    for (double c : tick_costs) ms.push_back(1000.0 * c);
    report.mean_tick_cost_ms = population_moments(ms).mean;
  }

  if (output_times.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(output_times.begin(), output_times.end());
    const double span = *hi - *lo;
    if (span > 0.0) {
      report.achieved_rate_hz = static_cast<double>(output_times.size() - 1) / span;
    }
  }
  return report;
}

std::string latency_csv(const LatencyReport& report) {
  std::string out = "camera,mean_ingest_ms,std_ingest_ms,mean_output_ms,std_output_ms\n";
  for (const auto& [id, c] : report.cameras) {
    out += std::to_string(id) + "," + fixed(c.mean_ingest_ms) + "," + fixed(c.std_ingest_ms) +
           "," + fixed(c.mean_output_ms) + "," + fixed(c.std_output_ms) + "\n";
  }
  return out;
}

}  // namespace mvpose
