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

#include "mvpose/skeleton.h"

#include <cmath>
#include <string>

#include "mvpose/error.h"

namespace mvpose {
namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "Neck",         "RightShoulder", "RightElbow", "RightWrist", "LeftShoulder",
    "LeftElbow",    "LeftWrist",     "Hips",       "RightHip",   "RightKnee",
    "RightAnkle",   "LeftHip",       "LeftKnee",   "LeftAnkle",
};

}  // namespace

std::string_view joint_name(JointId j) { return kJointNames[index_of(j)]; }

JointId joint_from_name(std::string_view name) {
  for (JointId j : kAllJoints) {
    if (kJointNames[index_of(j)] == name) return j;
  }
  throw ParseError("unknown joint name '" + std::string(name) + "'");
}

void Detection2D::validate() const {
  if (!std::isfinite(u) || !std::isfinite(v)) {
    throw InvariantViolation("detection: non-finite pixel coordinates");
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvariantViolation("detection: score outside [0, 1]");
  }
}

Skeleton3D to_skeleton3d(double timestamp, const JointPositions& joints) {
  Skeleton3D sk;
  sk.timestamp = timestamp;
  for (JointId j : kAllJoints) {
    sk.joints.set(j, JointEstimate{joints[index_of(j)], 0.0, 0});
  }
  return sk;
}

Vec3 neck_midpoint(const Skeleton3D& sk) {
  const Vec3* right = sk.position(JointId::kRightShoulder);
  const Vec3* left = sk.position(JointId::kLeftShoulder);
  if (!right || !left) {
    throw MissingJoint("neck midpoint needs both shoulders");
  }
  return 0.5 * (*right + *left);
}

}  // namespace mvpose
