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

// Synthetic scenes: a camera ring around a rigid-limb skeleton that either
// holds a T-pose or walks a random path, rendered into noisy per-camera 2D
// detections. Every output is a pure function of the SceneConfig.

#ifndef MVPOSE_SIMULATOR_H_
#define MVPOSE_SIMULATOR_H_

#include <cstdint>
#include <vector>

#include "mvpose/geometry.h"
#include "mvpose/pipeline.h"
#include "mvpose/skeleton.h"

namespace mvpose {

// Approximates an 848x480 RGB stream of a consumer depth camera.
CameraIntrinsics default_intrinsics();

struct CameraPlacement {
  CameraId camera = 0;
  Vec3 position = Vec3::Zero();
  Vec3 target = Vec3::Zero();
};

struct RigSpec {
  int count = 4;
  double radius = 4.5;   // meters
  double height = 1.0;   // mount height, meters
  Vec3 target = Vec3(0.0, 0.0, 1.0);
  CameraIntrinsics intrinsics = default_intrinsics();
  // Replace the pose of ring cameras by id.
  std::vector<CameraPlacement> overrides;
};

struct Anthropometry {
  double upper_arm = 0.30;
  double forearm = 0.27;
  double upper_leg = 0.42;
  double lower_leg = 0.41;
  double shoulder_width = 0.38;
  double hip_width = 0.26;
  double torso = 0.52;         // pelvis center to shoulder midpoint
  double ankle_height = 0.08;  // ankle above ground, legs straight
};

enum class MotionKind { kTPose, kWalk };

struct Motion {
  MotionKind kind = MotionKind::kTPose;
  double duration = 1.0;       // seconds
  double speed = 1.35;         // m/s, walk only
  double half_extent = 1.5;    // walk stays inside [-h, h]^2, meters
  double heading = 0.0;        // initial facing direction, radians from +X
};

struct NoiseModel {
  double pixel_sigma = 0.0;
  double score_clean = 0.9;
  double score_sigma = 0.0;

  void validate() const;
};

enum class OcclusionMode { kDrop, kCorrupt };

struct OcclusionSpec {
  CameraId camera = 0;
  std::vector<JointId> joints;
  double t0 = 0.0;
  double t1 = 0.0;
  OcclusionMode mode = OcclusionMode::kDrop;
  double offset_px = 0.0;  // corrupt only
  double score = 0.0;      // corrupt only

  bool applies(CameraId cam, JointId j, double t) const;
};

struct SceneConfig {
  std::uint64_t seed = 1;
  RigSpec rig;
  Motion motion;
  NoiseModel noise;
  std::vector<OcclusionSpec> occlusions;
  double fps = 30.0;
  Anthropometry body;

  void validate() const;  // throws InvariantViolation
};

struct GroundTruthFrame {
  double timestamp = 0.0;
  JointPositions joints{};

  Skeleton3D to_skeleton() const { return to_skeleton3d(timestamp, joints); }
};

// Cameras at angles 2 pi i / n on a horizontal circle, ids 0..n-1, each
// looking at `target`. Throws InvalidArgument for n < 2.
std::vector<Camera> place_cameras_on_circle(int n, double radius, double height,
                                            const Vec3& target,
                                            const CameraIntrinsics& intr = default_intrinsics());

// The ring from `spec` with its overrides applied.
Rig build_rig(const RigSpec& spec);

// Skeleton standing at `pelvis_xy` facing `heading`, arms horizontal.
JointPositions t_pose(const Anthropometry& body, const Vec2& pelvis_xy, double heading);

std::vector<GroundTruthFrame> generate_ground_truth(const SceneConfig& cfg);

// Projects, adds noise and scores, applies occlusions. Joints projecting
// behind a camera or outside its image are dropped.
ViewStreams render_detections(const std::vector<GroundTruthFrame>& gt, const Rig& rig,
                              const SceneConfig& cfg);

// Seed of the random substream for (seed, camera, frame); independent of
// evaluation order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t camera, std::uint64_t frame);

}  // namespace mvpose

#endif  // MVPOSE_SIMULATOR_H_
