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

// Body segments and their anatomical (ISB-style) coordinate frames.
//
// Every frame uses Z as the longitudinal axis of the segment, pointing from
// the distal towards the proximal joint (for the trunk: pelvis towards neck).
//
//   Chest        Z = pelvis -> shoulder midpoint, X = Z x (L->R shoulder line),
//                Y = Z x X
//   Upper arm    Z = elbow -> shoulder, Y = normal of the arm plane, X = Y x Z
//   Forearm      Z = wrist -> elbow,    Y = normal of the arm plane, X = Y x Z
//   Pelvis       Z = pelvis -> shoulder midpoint, X = (R->L hip line) x Z,
//                Y = Z x X
//   Upper leg    Z = knee -> hip,       Y = normal of the leg plane, X = Y x Z
//   Lower leg    Z = ankle -> knee,     Y = normal of the leg plane, X = Y x Z
//
// The limb plane normal is normalize(distal_z x proximal_z), so both
// segments of a limb share the same Y.

#ifndef MVPOSE_SEGMENT_FRAMES_H_
#define MVPOSE_SEGMENT_FRAMES_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>

#include "mvpose/skeleton.h"

namespace mvpose {

enum class SegmentId : std::uint8_t {
  kChest,
  kPelvis,
  kRightUpperArm,
  kLeftUpperArm,
  kRightForearm,
  kLeftForearm,
  kRightUpperLeg,
  kLeftUpperLeg,
  kRightLowerLeg,
  kLeftLowerLeg,
};

inline constexpr std::array<SegmentId, 10> kAllSegments = {
    SegmentId::kChest,         SegmentId::kPelvis,        SegmentId::kRightUpperArm,
    SegmentId::kLeftUpperArm,  SegmentId::kRightForearm,  SegmentId::kLeftForearm,
    SegmentId::kRightUpperLeg, SegmentId::kLeftUpperLeg,  SegmentId::kRightLowerLeg,
    SegmentId::kLeftLowerLeg,
};

std::string_view segment_name(SegmentId s);

// Cross products shorter than this (on unit vectors) are degenerate.
inline constexpr double kDegeneracyThreshold = 1e-8;

struct SegmentEndpoints {
  JointId proximal;
  JointId distal;
};

SegmentEndpoints segment_endpoints(SegmentId seg);

struct SegmentFrame {
  Mat3 rotation = Mat3::Identity();  // columns: X, Y, Z in world coordinates
  Vec3 origin = Vec3::Zero();

  Vec3 x() const { return rotation.col(0); }
  Vec3 y() const { return rotation.col(1); }
  Vec3 z() const { return rotation.col(2); }
};

using SegmentFrames = std::map<SegmentId, SegmentFrame>;

// Longitudinal (Z) axis of a segment. Empty when a needed joint is absent or
// the segment has zero length. Needs no plane, so it is defined for straight
// limbs too.
std::optional<Vec3> segment_z_axis(const Skeleton3D& sk, SegmentId seg);

// Frame of one segment; empty when a needed joint is absent.
// Throws DegenerateGeometry when the frame is undefined (collinear limb,
// shoulder line parallel to the spine, ...).
std::optional<SegmentFrame> compute_segment_frame(const Skeleton3D& sk, SegmentId seg);

// Frames of every segment whose joints are present. Throws DegenerateGeometry
// if any of those segments is degenerate.
SegmentFrames compute_segment_frames(const Skeleton3D& sk);

// Angle in [0, pi/2] between `segment_vector` (world) and a plane normal
// given in the segment frame's local coordinates. Throws ZeroVector.
double segment_plane_angle(const SegmentFrame& frame, const Vec3& segment_vector,
                           const Vec3& plane_normal);

}  // namespace mvpose

#endif  // MVPOSE_SEGMENT_FRAMES_H_
