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

#include "mvpose/weights.h"

#include <algorithm>
#include <cmath>

#include "mvpose/error.h"

namespace mvpose {

std::string_view weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::kUniform:
      return "uniform";
    case WeightMode::kScoreOnly:
      return "score";
    case WeightMode::kAll:
      return "all";
  }
  return "all";
}

std::optional<WeightMode> parse_weight_mode(std::string_view s) {
  if (s == "uniform" || s == "Uniform") return WeightMode::kUniform;
  if (s == "score" || s == "ScoreOnly" || s == "score_only") return WeightMode::kScoreOnly;
  if (s == "all" || s == "All") return WeightMode::kAll;
  return std::nullopt;
}

void WeightParams::validate() const {
  if (!(s_th >= 0.0 && s_th <= 1.0)) {
    throw InvariantViolation("weight params: s_th must lie in [0, 1]");
  }
  if (!(d_min > 0.0 && d_min < d_max) || !std::isfinite(d_max)) {
    throw InvariantViolation("weight params: need 0 < d_min < d_max");
  }
}

double score_weight(double score, double s_th) {
  if (score < s_th) return 0.0;
  return score * score;
}

double distance_weight(double d, double d_min, double d_max) {
  if (!(d > 0.0)) return 0.0;
  if (d < d_min) return d / d_min;
  if (d <= d_max) return 1.0;
  if (d < 2.0 * d_max) return (2.0 * d_max - d) / d_max;
  return 0.0;
}

double orthogonality_weight(const Vec3& optical_axis, const Vec3& segment_z) {
  return std::clamp(1.0 - std::abs(optical_axis.dot(segment_z)), 0.0, 1.0);
}

double combine_weights(double ws, double wo, double wd) { return ws * (wo + wd) / 2.0; }

}  // namespace mvpose
