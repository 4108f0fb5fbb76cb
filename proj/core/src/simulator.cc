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

#include "mvpose/simulator.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvpose/error.h"

namespace mvpose {
namespace {

constexpr double kPi = std::numbers::pi;

// Gait shape. Hip flexion and arm swing are sinusoids of a phase that
// advances with distance walked; knees and elbows never fully extend.
constexpr double kStrideLength = 1.4;        // meters per full gait cycle
constexpr double kHipAmplitude = 0.35;       // radians
constexpr double kKneeBase = 0.25;
constexpr double kKneeAmplitude = 0.45;
constexpr double kArmSwing = 0.40;
constexpr double kElbowFlexion = 0.40;

// Path steering.
constexpr double kWanderRate = 0.6;      // max |turn rate| while wandering, rad/s
constexpr double kWanderInterval = 1.0;  // seconds between turn-rate changes
constexpr double kSteerRate = 3.2;       // rad/s when heading back to the center
constexpr double kSteerFraction = 0.5;   // steer once |p| exceeds this * half_extent

constexpr std::uint64_t kMotionStream = 0xffffffffffffffffull;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct BodyAxes {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

BodyAxes axes_for(double heading) {
  const Vec3 forward(std::cos(heading), std::sin(heading), 0.0);
  const Vec3 up = Vec3::UnitZ();
  return BodyAxes{forward, forward.cross(up), up};
}

void set(JointPositions& p, JointId j, const Vec3& x) { p[index_of(j)] = x; }
const Vec3& get(const JointPositions& p, JointId j) { return p[index_of(j)]; }

double hip_height(const Anthropometry& b) { return b.ankle_height + b.upper_leg + b.lower_leg; }

// Direction in the sagittal plane: `angle` radians forward of straight down.
Vec3 sagittal(const BodyAxes& ax, double angle) {
  return std::cos(angle) * (-ax.up) + std::sin(angle) * ax.forward;
}

JointPositions walking_pose(const Anthropometry& b, const Vec2& pelvis_xy, double heading,
                            double phase) {
  const BodyAxes ax = axes_for(heading);
  JointPositions p{};
  const Vec3 hips(pelvis_xy.x(), pelvis_xy.y(), hip_height(b));
  const Vec3 neck = hips + b.torso * ax.up;
  set(p, JointId::kHips, hips);
  set(p, JointId::kNeck, neck);

  struct Side {
    double sign;  // +1 right, -1 left
    double phase;
    JointId shoulder, elbow, wrist, hip, knee, ankle;
  };
  const Side sides[2] = {
      {+1.0, phase, JointId::kRightShoulder, JointId::kRightElbow, JointId::kRightWrist,
       JointId::kRightHip, JointId::kRightKnee, JointId::kRightAnkle},
      {-1.0, phase + kPi, JointId::kLeftShoulder, JointId::kLeftElbow, JointId::kLeftWrist,
       JointId::kLeftHip, JointId::kLeftKnee, JointId::kLeftAnkle},
  };
  for (const Side& s : sides) {
    const double hip_flex = kHipAmplitude * std::sin(s.phase);
    const double knee_flex = kKneeBase + kKneeAmplitude * std::max(0.0, std::sin(s.phase + kPi / 2));
    const Vec3 hip = hips + s.sign * 0.5 * b.hip_width * ax.right;
    const Vec3 knee = hip + b.upper_leg * sagittal(ax, hip_flex);
    const Vec3 ankle = knee + b.lower_leg * sagittal(ax, hip_flex - knee_flex);
    set(p, s.hip, hip);
    set(p, s.knee, knee);
    set(p, s.ankle, ankle);

    // Arms swing against the leg on the same side.
    const double swing = -kArmSwing * std::sin(s.phase);
    const Vec3 shoulder = neck + s.sign * 0.5 * b.shoulder_width * ax.right;
    const Vec3 elbow = shoulder + b.upper_arm * sagittal(ax, swing);
    const Vec3 wrist = elbow + b.forearm * sagittal(ax, swing + kElbowFlexion);
    set(p, s.shoulder, shoulder);
    set(p, s.elbow, elbow);
    set(p, s.wrist, wrist);
  }
  return p;
}

std::size_t frame_count(const SceneConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.motion.duration * cfg.fps));
}

}  // namespace

CameraIntrinsics default_intrinsics() {
  CameraIntrinsics k;
  k.fx = 615.0;
  k.fy = 615.0;
  k.cx = 424.0;
  k.cy = 240.0;
  k.width = 848;
  k.height = 480;
  return k;
}

void NoiseModel::validate() const {
  if (!(pixel_sigma >= 0.0)) throw InvariantViolation("noise: pixel_sigma must be >= 0");
  if (!(score_clean >= 0.0 && score_clean <= 1.0) || !(score_sigma >= 0.0 && score_sigma <= 1.0)) {
    throw InvariantViolation("noise: score parameters must lie in [0, 1]");
  }
}

bool OcclusionSpec::applies(CameraId cam, JointId j, double t) const {
  if (cam != camera || t < t0 || t > t1) return false;
  return std::find(joints.begin(), joints.end(), j) != joints.end();
}

void SceneConfig::validate() const {
  if (rig.count < 2) throw InvariantViolation("scene: rig needs at least two cameras");
  if (!(rig.radius > 0.0)) throw InvariantViolation("scene: rig radius must be positive");
  if (!(fps > 0.0)) throw InvariantViolation("scene: fps must be positive");
  if (!(motion.duration > 0.0)) throw InvariantViolation("scene: duration must be positive");
  if (motion.kind == MotionKind::kWalk && (!(motion.speed >= 0.0) || !(motion.half_extent > 0.0))) {
    throw InvariantViolation("scene: walk needs speed >= 0 and positive bounds");
  }
  rig.intrinsics.validate();
  noise.validate();
  for (const OcclusionSpec& o : occlusions) {
    if (!(o.t0 < o.t1)) throw InvariantViolation("scene: occlusion interval needs t0 < t1");
    if (!(o.offset_px >= 0.0)) throw InvariantViolation("scene: occlusion offset must be >= 0");
    if (!(o.score >= 0.0 && o.score <= 1.0)) {
      throw InvariantViolation("scene: occlusion score must lie in [0, 1]");
    }
  }
}

std::vector<Camera> place_cameras_on_circle(int n, double radius, double height,
                                            const Vec3& target, const CameraIntrinsics& intr) {
  if (n < 2) throw InvalidArgument("place_cameras_on_circle: need at least two cameras");
  std::vector<Camera> cams;
  cams.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * kPi * i / n;
    const Vec3 position(radius * std::cos(angle), radius * std::sin(angle), height);
    cams.emplace_back(static_cast<CameraId>(i), intr, look_at(position, target));
  }
  return cams;
}

Rig build_rig(const RigSpec& spec) {
  Rig rig;
  for (Camera& c : place_cameras_on_circle(spec.count, spec.radius, spec.height, spec.target,
                                           spec.intrinsics)) {
    rig.emplace(c.id(), std::move(c));
  }
  for (const CameraPlacement& o : spec.overrides) {
    rig.erase(o.camera);
    rig.emplace(o.camera, Camera(o.camera, spec.intrinsics, look_at(o.position, o.target)));
  }
  return rig;
}

JointPositions t_pose(const Anthropometry& b, const Vec2& pelvis_xy, double heading) {
  const BodyAxes ax = axes_for(heading);
  JointPositions p{};
  const Vec3 hips(pelvis_xy.x(), pelvis_xy.y(), hip_height(b));
  const Vec3 neck = hips + b.torso * ax.up;
  set(p, JointId::kHips, hips);
  set(p, JointId::kNeck, neck);
  for (double sign : {+1.0, -1.0}) {
    const bool right = sign > 0;
    const Vec3 side = sign * ax.right;
    const Vec3 shoulder = neck + 0.5 * b.shoulder_width * side;
    const Vec3 elbow = shoulder + b.upper_arm * side;
    const Vec3 wrist = elbow + b.forearm * side;
    const Vec3 hip = hips + 0.5 * b.hip_width * side;
    const Vec3 knee = hip - b.upper_leg * ax.up;
    const Vec3 ankle = knee - b.lower_leg * ax.up;
    set(p, right ? JointId::kRightShoulder : JointId::kLeftShoulder, shoulder);
    set(p, right ? JointId::kRightElbow : JointId::kLeftElbow, elbow);
    set(p, right ? JointId::kRightWrist : JointId::kLeftWrist, wrist);
    set(p, right ? JointId::kRightHip : JointId::kLeftHip, hip);
    set(p, right ? JointId::kRightKnee : JointId::kLeftKnee, knee);
    set(p, right ? JointId::kRightAnkle : JointId::kLeftAnkle, ankle);
  }
  return p;
}

std::vector<GroundTruthFrame> generate_ground_truth(const SceneConfig& cfg) {
  cfg.validate();
  const std::size_t n = frame_count(cfg);
  std::vector<GroundTruthFrame> frames;
  frames.reserve(n);

  if (cfg.motion.kind == MotionKind::kTPose) {
    const JointPositions pose = t_pose(cfg.body, Vec2::Zero(), cfg.motion.heading);
    for (std::size_t k = 0; k < n; ++k) {
      frames.push_back(GroundTruthFrame{static_cast<double>(k) / cfg.fps, pose});
    }
    return frames;
  }

  std::mt19937_64 rng(substream_seed(cfg.seed, kMotionStream, 0));
  std::uniform_real_distribution<double> wander(-kWanderRate, kWanderRate);
  const double dt = 1.0 / cfg.fps;
  const double step = cfg.motion.speed * dt;
  const double steer_radius = kSteerFraction * cfg.motion.half_extent;
  const std::size_t wander_frames =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kWanderInterval * cfg.fps)));

  Vec2 pos = Vec2::Zero();
  double heading = cfg.motion.heading;
  double phase = 0.0;
  double turn_rate = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    frames.push_back(GroundTruthFrame{static_cast<double>(k) * dt,
                                      walking_pose(cfg.body, pos, heading, phase)});

    if (k % wander_frames == 0) turn_rate = wander(rng);
    const Vec2 dir(std::cos(heading), std::sin(heading));
    double rate = turn_rate;
    if (pos.norm() > steer_radius && dir.dot(pos) > 0.0) {
      // Turn towards the center along the shorter side.
      const double side = dir.x() * (-pos.y()) - dir.y() * (-pos.x());
      rate = side >= 0.0 ? kSteerRate : -kSteerRate;
    }
    heading += rate * dt;
    pos += step * Vec2(std::cos(heading), std::sin(heading));
    phase += 2.0 * kPi * step / kStrideLength;
  }
  return frames;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t camera, std::uint64_t frame) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ camera);
  return splitmix64(h ^ (frame * 0xd1b54a32d192ed03ull));
}

ViewStreams render_detections(const std::vector<GroundTruthFrame>& gt, const Rig& rig,
                              const SceneConfig& cfg) {
  cfg.validate();
  ViewStreams streams;
  for (const auto& [id, cam] : rig) {
    std::vector<Skeleton2D>& stream = streams[id];
    stream.reserve(gt.size());
    for (std::size_t k = 0; k < gt.size(); ++k) {
      const GroundTruthFrame& frame = gt[k];
      std::mt19937_64 rng(substream_seed(cfg.seed, id, k));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

      Skeleton2D view;
      view.camera = id;
      view.timestamp = frame.timestamp;
      for (JointId j : kAllJoints) {
        // Fixed draw count per joint keeps substreams aligned across drops.
        const double nu = gauss(rng);
        const double nv = gauss(rng);
        const double ns = gauss(rng);
        const double theta = angle(rng);

        const Vec3 h = cam.projection().matrix() * get(frame.joints, j).homogeneous();
        if (!(h.z() > kMinDepth)) continue;
        const Vec2 exact(h.x() / h.z(), h.y() / h.z());
        if (!cam.in_image(exact)) continue;

        Detection2D det;
        det.u = exact.x() + cfg.noise.pixel_sigma * nu;
        det.v = exact.y() + cfg.noise.pixel_sigma * nv;
        det.score = std::clamp(cfg.noise.score_clean + cfg.noise.score_sigma * ns, 0.0, 1.0);

        bool dropped = false;
        for (const OcclusionSpec& occ : cfg.occlusions) {
          if (!occ.applies(id, j, frame.timestamp)) continue;
          if (occ.mode == OcclusionMode::kDrop) {
            dropped = true;
            break;
          }
          det.u += occ.offset_px * std::cos(theta);
          det.v += occ.offset_px * std::sin(theta);
          det.score = occ.score;
        }
        if (!dropped) view.joints.set(j, det);
      }
      stream.push_back(std::move(view));
    }
  }
  return streams;
}

}  // namespace mvpose
