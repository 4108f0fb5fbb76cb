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

// The 14-joint body vocabulary and the 2D / 3D skeleton containers.

#ifndef MVPOSE_SKELETON_H_
#define MVPOSE_SKELETON_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "mvpose/geometry.h"

namespace mvpose {

// Canonical order; serialization and iteration follow it.
enum class JointId : std::uint8_t {
  kNeck,
  kRightShoulder,
  kRightElbow,
  kRightWrist,
  kLeftShoulder,
  kLeftElbow,
  kLeftWrist,
  kHips,
  kRightHip,
  kRightKnee,
  kRightAnkle,
  kLeftHip,
  kLeftKnee,
  kLeftAnkle,
};

inline constexpr std::size_t kJointCount = 14;

inline constexpr std::array<JointId, kJointCount> kAllJoints = {
    JointId::kNeck,         JointId::kRightShoulder, JointId::kRightElbow,
    JointId::kRightWrist,   JointId::kLeftShoulder,  JointId::kLeftElbow,
    JointId::kLeftWrist,    JointId::kHips,          JointId::kRightHip,
    JointId::kRightKnee,    JointId::kRightAnkle,    JointId::kLeftHip,
    JointId::kLeftKnee,     JointId::kLeftAnkle,
};

constexpr std::size_t index_of(JointId j) { return static_cast<std::size_t>(j); }

// "Neck", "RightShoulder", ...
std::string_view joint_name(JointId j);
// Throws ParseError for unknown names.
JointId joint_from_name(std::string_view name);

// Fixed-capacity partial map JointId -> T. Iteration visits present joints in
// canonical order.
template <typename T>
class JointMap {
 public:
  bool contains(JointId j) const { return slots_[index_of(j)].has_value(); }
  const T* find(JointId j) const {
    const auto& s = slots_[index_of(j)];
    return s ? &*s : nullptr;
  }
  T* find(JointId j) {
    auto& s = slots_[index_of(j)];
    return s ? &*s : nullptr;
  }
  // Precondition: contains(j).
  const T& at(JointId j) const { return *slots_[index_of(j)]; }
  void set(JointId j, T value) { slots_[index_of(j)] = std::move(value); }
  void erase(JointId j) { slots_[index_of(j)].reset(); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& s : slots_) n += s.has_value();
    return n;
  }
  bool empty() const { return size() == 0; }

  template <typename F>
  void for_each(F&& f) const {
    for (JointId j : kAllJoints) {
      if (const T* v = find(j)) f(j, *v);
    }
  }

  bool operator==(const JointMap&) const = default;

 private:
  std::array<std::optional<T>, kJointCount> slots_{};
};

struct Detection2D {
  double u = 0.0;
  double v = 0.0;
  double score = 0.0;  // [0, 1]

  Vec2 pixel() const { return Vec2(u, v); }
  // Throws InvariantViolation for non-finite pixels or score outside [0,1].
  void validate() const;
  bool operator==(const Detection2D&) const = default;
};

struct Skeleton2D {
  CameraId camera = 0;
  double timestamp = 0.0;  // seconds, common monotonic clock
  JointMap<Detection2D> joints;

  bool operator==(const Skeleton2D&) const = default;
};

struct JointEstimate {
  Vec3 position = Vec3::Zero();
  double residual = 0.0;  // weighted RMS reprojection residual, pixels
  int cameras_used = 0;

  bool operator==(const JointEstimate&) const = default;
};

struct Skeleton3D {
  double timestamp = 0.0;
  JointMap<JointEstimate> joints;

  const Vec3* position(JointId j) const {
    const JointEstimate* e = joints.find(j);
    return e ? &e->position : nullptr;
  }
};

// Ground-truth style skeleton: every joint present.
using JointPositions = std::array<Vec3, kJointCount>;

Skeleton3D to_skeleton3d(double timestamp, const JointPositions& joints);

// Mean of the two shoulders. Throws MissingJoint if either is absent.
Vec3 neck_midpoint(const Skeleton3D& sk);

}  // namespace mvpose

#endif  // MVPOSE_SKELETON_H_
