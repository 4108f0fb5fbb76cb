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

// Per-camera reliability weights for the weighted triangulation.

#ifndef MVPOSE_WEIGHTS_H_
#define MVPOSE_WEIGHTS_H_

#include <optional>
#include <string_view>

#include "mvpose/geometry.h"

namespace mvpose {

enum class WeightMode {
  kUniform,    // plain least squares over every detection, no score gate
  kScoreOnly,  // score weight only
  kAll,        // score x (orthogonality + distance) / 2
};

std::string_view weight_mode_name(WeightMode m);  // "uniform", "score", "all"
// Accepts the names above plus "Uniform", "ScoreOnly", "All".
std::optional<WeightMode> parse_weight_mode(std::string_view s);

struct WeightParams {
  double s_th = 0.4;   // score threshold
  double d_min = 1.0;  // meters; distance weight is 1 on [d_min, d_max]
  double d_max = 4.0;
  bool use_distance = true;
  bool use_orthogonality = true;
  WeightMode weight_mode = WeightMode::kAll;

  // Throws InvariantViolation.
  void validate() const;
};

// 0 below the threshold, score^2 otherwise.
double score_weight(double score, double s_th);

// Trapezoid: 0 at d = 0, rises linearly to 1 at d_min, flat up to d_max,
// falls linearly to 0 at 2 d_max, 0 beyond.
double distance_weight(double d, double d_min, double d_max);

// 1 - |axis . segment_z| clamped to [0, 1]: maximal for a limb perpendicular
// to the viewing direction.
double orthogonality_weight(const Vec3& optical_axis, const Vec3& segment_z);

// ws * (wo + wd) / 2
double combine_weights(double ws, double wo, double wd);

}  // namespace mvpose

#endif  // MVPOSE_WEIGHTS_H_
