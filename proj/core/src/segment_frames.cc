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

#include "mvpose/segment_frames.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "mvpose/error.h"

namespace mvpose {
namespace {

constexpr std::array<std::string_view, 10> kSegmentNames = {
    "Chest",         "Pelvis",       "RightUpperArm", "LeftUpperArm",  "RightForearm",
    "LeftForearm",   "RightUpperLeg", "LeftUpperLeg", "RightLowerLeg", "LeftLowerLeg",
};

struct Limb {
  JointId root;
  JointId middle;
  JointId end;
};

bool is_right(SegmentId seg) {
  switch (seg) {
    case SegmentId::kRightUpperArm:
    case SegmentId::kRightForearm:
    case SegmentId::kRightUpperLeg:
    case SegmentId::kRightLowerLeg:
      return true;
    default:
      return false;
  }
}

Limb limb_of(SegmentId seg) {
  const bool right = is_right(seg);
  switch (seg) {
    case SegmentId::kRightUpperArm:
    case SegmentId::kLeftUpperArm:
    case SegmentId::kRightForearm:
    case SegmentId::kLeftForearm:
      return right ? Limb{JointId::kRightShoulder, JointId::kRightElbow, JointId::kRightWrist}
                   : Limb{JointId::kLeftShoulder, JointId::kLeftElbow, JointId::kLeftWrist};
    default:
      return right ? Limb{JointId::kRightHip, JointId::kRightKnee, JointId::kRightAnkle}
                   : Limb{JointId::kLeftHip, JointId::kLeftKnee, JointId::kLeftAnkle};
  }
}

bool is_proximal_limb_segment(SegmentId seg) {
  return seg == SegmentId::kRightUpperArm || seg == SegmentId::kLeftUpperArm ||
         seg == SegmentId::kRightUpperLeg || seg == SegmentId::kLeftUpperLeg;
}

std::optional<Vec3> unit(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return std::nullopt;
  return v / n;
}

Vec3 unit_cross(const Vec3& a, const Vec3& b, SegmentId seg, const char* what) {
  const Vec3 c = a.cross(b);
  const double n = c.norm();
  if (!(n >= kDegeneracyThreshold)) {
    throw DegenerateGeometry(std::string(segment_name(seg)) + " frame undefined: " + what);
  }
  return c / n;
}

// Direction from `from` to `to`, empty when either joint is missing.
std::optional<Vec3> direction(const Skeleton3D& sk, JointId from, JointId to) {
  const Vec3* a = sk.position(from);
  const Vec3* b = sk.position(to);
  if (!a || !b) return std::nullopt;
  return unit(*b - *a);
}

std::optional<Vec3> spine_axis(const Skeleton3D& sk) {
  const Vec3* pelvis = sk.position(JointId::kHips);
  if (!pelvis || !sk.joints.contains(JointId::kRightShoulder) ||
      !sk.joints.contains(JointId::kLeftShoulder)) {
    return std::nullopt;
  }
  return unit(neck_midpoint(sk) - *pelvis);
}

SegmentFrame make_frame(const Vec3& x, const Vec3& y, const Vec3& z, const Vec3& origin) {
  SegmentFrame f;
  f.rotation.col(0) = x;
  f.rotation.col(1) = y;
  f.rotation.col(2) = z;
  f.origin = origin;
  return f;
}

}  // namespace

std::string_view segment_name(SegmentId s) {
  return kSegmentNames[static_cast<std::size_t>(s)];
}

SegmentEndpoints segment_endpoints(SegmentId seg) {
  switch (seg) {
    case SegmentId::kChest:
      return {JointId::kHips, JointId::kNeck};
    case SegmentId::kPelvis:
      return {JointId::kHips, JointId::kLeftHip};
    default: {
      const Limb limb = limb_of(seg);
      return is_proximal_limb_segment(seg) ? SegmentEndpoints{limb.root, limb.middle}
                                           : SegmentEndpoints{limb.middle, limb.end};
    }
  }
}

std::optional<Vec3> segment_z_axis(const Skeleton3D& sk, SegmentId seg) {
  switch (seg) {
    case SegmentId::kChest:
    case SegmentId::kPelvis:
      return spine_axis(sk);
    default: {
      const SegmentEndpoints ends = segment_endpoints(seg);
      return direction(sk, ends.distal, ends.proximal);
    }
  }
}

std::optional<SegmentFrame> compute_segment_frame(const Skeleton3D& sk, SegmentId seg) {
  switch (seg) {
    case SegmentId::kChest: {
      const bool present = sk.joints.contains(JointId::kHips) &&
                           sk.joints.contains(JointId::kRightShoulder) &&
                           sk.joints.contains(JointId::kLeftShoulder);
      if (!present) return std::nullopt;
      const std::optional<Vec3> z = spine_axis(sk);
      const std::optional<Vec3> girdle =
          direction(sk, JointId::kLeftShoulder, JointId::kRightShoulder);
      if (!z || !girdle) {
        throw DegenerateGeometry("Chest frame undefined: zero-length spine or girdle");
      }
      const Vec3 x = unit_cross(*z, *girdle, seg, "shoulder line parallel to spine");
      const Vec3 y = z->cross(x);
      return make_frame(x, y, *z, sk.joints.at(JointId::kHips).position);
    }
    case SegmentId::kPelvis: {
      const bool present = sk.joints.contains(JointId::kHips) &&
                           sk.joints.contains(JointId::kRightHip) &&
                           sk.joints.contains(JointId::kLeftHip) &&
                           sk.joints.contains(JointId::kRightShoulder) &&
                           sk.joints.contains(JointId::kLeftShoulder);
      if (!present) return std::nullopt;
      const std::optional<Vec3> z = spine_axis(sk);
      const std::optional<Vec3> hips = direction(sk, JointId::kRightHip, JointId::kLeftHip);
      if (!z || !hips) {
        throw DegenerateGeometry("Pelvis frame undefined: zero-length spine or hip line");
      }
      const Vec3 x = unit_cross(*hips, *z, seg, "hip line parallel to spine");
      const Vec3 y = z->cross(x);
      return make_frame(x, y, *z, sk.joints.at(JointId::kHips).position);
    }
    default: {
      const Limb limb = limb_of(seg);
      if (!sk.joints.contains(limb.root) || !sk.joints.contains(limb.middle) ||
          !sk.joints.contains(limb.end)) {
        return std::nullopt;
      }
      const std::optional<Vec3> proximal_z = direction(sk, limb.middle, limb.root);
      const std::optional<Vec3> distal_z = direction(sk, limb.end, limb.middle);
      if (!proximal_z || !distal_z) {
        throw DegenerateGeometry(std::string(segment_name(seg)) +
                                 " frame undefined: zero-length limb segment");
      }
      const Vec3 y = unit_cross(*distal_z, *proximal_z, seg, "collinear limb segments");
      const Vec3& z = is_proximal_limb_segment(seg) ? *proximal_z : *distal_z;
      const Vec3 x = y.cross(z);
      const SegmentEndpoints ends = segment_endpoints(seg);
      return make_frame(x, y, z, sk.joints.at(ends.proximal).position);
    }
  }
}

SegmentFrames compute_segment_frames(const Skeleton3D& sk) {
  SegmentFrames frames;
  for (SegmentId seg : kAllSegments) {
    if (std::optional<SegmentFrame> f = compute_segment_frame(sk, seg)) {
      frames.emplace(seg, *f);
    }
  }
  return frames;
}

double segment_plane_angle(const SegmentFrame& frame, const Vec3& segment_vector,
                           const Vec3& plane_normal) {
  const std::optional<Vec3> s = unit(segment_vector);
  const std::optional<Vec3> n = unit(frame.rotation * plane_normal);
  if (!s || !n) throw ZeroVector("segment_plane_angle: zero-length vector");
  const double c = std::clamp(std::abs(s->dot(*n)), 0.0, 1.0);
  return std::acos(c);
}

}  // namespace mvpose
