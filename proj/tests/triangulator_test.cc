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

#include "mvpose/triangulator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mvpose/error.h"
#include "mvpose/pipeline.h"
#include "mvpose/segment_frames.h"
#include "mvpose/simulator.h"
#include "mvpose/weights.h"

namespace mvpose {
namespace {

constexpr double kPi = 3.14159265358979323846;

CameraIntrinsics test_intrinsics() {
  CameraIntrinsics k;
  k.fx = k.fy = 500;
  k.cx = 320;
  k.cy = 240;
  k.width = 640;
  k.height = 480;
  return k;
}

std::map<CameraId, Detection2D> exact_detections(const Rig& rig, const Vec3& x,
                                                 double score = 0.9) {
  std::map<CameraId, Detection2D> d;
  for (const auto& [id, cam] : rig) {
    const Vec2 px = project(cam.projection(), x).pixel;
    d[id] = Detection2D{px.x(), px.y(), score};
  }
  return d;
}

std::map<CameraId, ProjectionMatrix> projections(const Rig& rig) {
  std::map<CameraId, ProjectionMatrix> m;
  for (const auto& [id, cam] : rig) m.emplace(id, cam.projection());
  return m;
}

Rig ring(int n, double radius = 4.5) {
  Rig rig;
  for (const Camera& c : place_cameras_on_circle(n, radius, 1.0, Vec3(0, 0, 1))) {
    rig.emplace(c.id(), c);
  }
  return rig;
}

// Oracle: explicit weighted normal equations solved by a full-pivot LU.
Vec3 oracle_wls(const DltSystem& sys, const Eigen::VectorXd& w) {
  Mat3 n = Mat3::Zero();
  Vec3 r = Vec3::Zero();
  for (Eigen::Index i = 0; i < sys.a.rows(); ++i) {
    const Vec3 row = sys.a.row(i).transpose();
    n += w(i) * row * row.transpose();
    r += w(i) * row * sys.b(i);
  }
  return n.fullPivLu().solve(r);
}

TEST(ScoreWeight, Examples) {
  EXPECT_EQ(score_weight(0.3, 0.4), 0.0);
  EXPECT_EQ(score_weight(1.0, 0.4), 1.0);
  EXPECT_NEAR(score_weight(0.8, 0.4), 0.64, 1e-15);
  EXPECT_NEAR(score_weight(0.4, 0.4), 0.16, 1e-15);
}

TEST(DistanceWeight, Examples) {
  EXPECT_EQ(distance_weight(2.5, 1.0, 4.0), 1.0);
  EXPECT_EQ(distance_weight(0.0, 1.0, 4.0), 0.0);
  EXPECT_NEAR(distance_weight(6.0, 1.0, 4.0), 0.5, 1e-15);
  EXPECT_NEAR(distance_weight(0.5, 1.0, 4.0), 0.5, 1e-15);
  EXPECT_EQ(distance_weight(8.0, 1.0, 4.0), 0.0);
  EXPECT_EQ(distance_weight(20.0, 1.0, 4.0), 0.0);
}

TEST(OrthogonalityWeight, Examples) {
  EXPECT_NEAR(orthogonality_weight(Vec3(1, 0, 0), Vec3(0, 0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(orthogonality_weight(Vec3(1, 0, 0), Vec3(1, 0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(orthogonality_weight(Vec3(1, 0, 0), Vec3(-1, 0, 0)), 0.0, 1e-15);
  const Vec3 half(0.5, std::sqrt(0.75), 0.0);
  EXPECT_NEAR(orthogonality_weight(Vec3(1, 0, 0), half), 0.5, 1e-15);
}

TEST(CombineWeights, Examples) {
  EXPECT_EQ(combine_weights(0.0, 0.7, 0.9), 0.0);
  EXPECT_EQ(combine_weights(1.0, 1.0, 1.0), 1.0);
  EXPECT_NEAR(combine_weights(0.64, 0.5, 1.0), 0.48, 1e-15);
}

TEST(Weights, RangeAndMonotoneProfiles) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double s = u(rng), th = u(rng);
    EXPECT_GE(score_weight(s, th), 0.0);
    EXPECT_LE(score_weight(s, th), 1.0);
    const double d = 12.0 * u(rng);
    const double w = distance_weight(d, 1.0, 4.0);
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
    const double eps = 1e-3;
    const double w2 = distance_weight(d + eps, 1.0, 4.0);
    if (d + eps <= 1.0) EXPECT_GE(w2, w);
    if (d >= 4.0) EXPECT_LE(w2, w);
    if (d >= 1.0 && d + eps <= 4.0) EXPECT_EQ(w2, w);
    if (s + eps <= 1.0 && s >= th) EXPECT_GE(score_weight(s + eps, th), score_weight(s, th));
  }
}

TEST(WeightParams, ValidateAndModeNames) {
  WeightParams p;
  EXPECT_NO_THROW(p.validate());
  p.d_min = 5.0;
  EXPECT_THROW(p.validate(), InvariantViolation);
  p = WeightParams{};
  p.s_th = 1.2;
  EXPECT_THROW(p.validate(), InvariantViolation);
  EXPECT_EQ(parse_weight_mode("All"), WeightMode::kAll);
  EXPECT_EQ(parse_weight_mode("ScoreOnly"), WeightMode::kScoreOnly);
  EXPECT_EQ(parse_weight_mode("uniform"), WeightMode::kUniform);
  EXPECT_FALSE(parse_weight_mode("heavy"));
}

TEST(BuildDltSystem, TwoIdentityPoseCameras) {
  Rig rig;
  CameraExtrinsics a, b;
  b.translation = Vec3(0.5, 0, 0);
  rig.emplace(0, Camera(0, test_intrinsics(), a));
  rig.emplace(1, Camera(1, test_intrinsics(), b));
  const Vec3 x(0.3, -0.1, 2.0);
  const DltSystem sys = build_dlt_system(exact_detections(rig, x), projections(rig));
  ASSERT_EQ(sys.a.rows(), 4);
  EXPECT_EQ(sys.camera_order, (std::vector<CameraId>{0, 1}));
  EXPECT_LT((sys.a * x - sys.b).norm(), 1e-9);
}

TEST(BuildDltSystem, RowLayout) {
  Rig rig = ring(2);
  const auto dets = exact_detections(rig, Vec3(0.1, 0.2, 1.1));
  const DltSystem sys = build_dlt_system(dets, projections(rig));
  for (std::size_t i = 0; i < sys.camera_count(); ++i) {
    const CameraId id = sys.camera_order[i];
    const Mat34& m = rig.at(id).projection().matrix();
    const Detection2D& d = dets.at(id);
    const auto r = [&](int k) { return Vec3(m.block<1, 3>(k, 0).transpose()); };
    EXPECT_LT((Vec3(sys.a.row(2 * i).transpose()) - (d.u * r(2) - r(0))).norm(), 1e-12);
    EXPECT_LT((Vec3(sys.a.row(2 * i + 1).transpose()) - (d.v * r(2) - r(1))).norm(), 1e-12);
    EXPECT_NEAR(sys.b(2 * i), m(0, 3) - d.u * m(2, 3), 1e-9);
    EXPECT_NEAR(sys.b(2 * i + 1), m(1, 3) - d.v * m(2, 3), 1e-9);
  }
}

TEST(BuildDltSystem, OneCameraIsInsufficient) {
  Rig rig = ring(4);
  auto dets = exact_detections(rig, Vec3(0, 0, 1));
  std::map<CameraId, Detection2D> one = {{0, dets.at(0)}};
  EXPECT_THROW(build_dlt_system(one, projections(rig)), InsufficientCameras);
  // Detections from cameras missing in the rig do not count.
  std::map<CameraId, Detection2D> stray = {{0, dets.at(0)}, {42, dets.at(1)}};
  EXPECT_THROW(build_dlt_system(stray, projections(rig)), InsufficientCameras);
}

TEST(BuildDltSystem, RigCamerasExactForInVolumePoints) {
  Rig rig = ring(4);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x(u(rng), u(rng), 1.0 + 0.8 * u(rng));
    const DltSystem sys = build_dlt_system(exact_detections(rig, x), projections(rig));
    EXPECT_LT((sys.a * x - sys.b).norm(), 1e-9);
    const WlsSolution s = wls_solve(sys, WeightMatrix::uniform(sys.camera_count()));
    EXPECT_LT((s.x - x).norm(), 1e-6);
    EXPECT_LT(s.residual, 1e-9);
  }
}

TEST(WlsSolve, ZeroWeightEqualsRemoval) {
  Rig rig = ring(4);
  const Vec3 x(0.2, 0.3, 1.2);
  auto dets = exact_detections(rig, x);
  dets[2].u += 200.0;
  const DltSystem all = build_dlt_system(dets, projections(rig));
  const WlsSolution with_zero = wls_solve(all, WeightMatrix::from_camera_weights({1, 0.7, 0, 0.4}));
  dets.erase(2);
  const DltSystem without = build_dlt_system(dets, projections(rig));
  const WlsSolution removed = wls_solve(without, WeightMatrix::from_camera_weights({1, 0.7, 0.4}));
  EXPECT_LE((with_zero.x - removed.x).norm(), 1e-12 * removed.x.norm());
  EXPECT_LT((with_zero.x - x).norm(), 1e-6);
}

TEST(WlsSolve, DuplicateCameraIsRankDeficient) {
  Rig rig;
  const CameraExtrinsics e = look_at(Vec3(4.5, 0, 1), Vec3(0, 0, 1));
  rig.emplace(0, Camera(0, test_intrinsics(), e));
  rig.emplace(1, Camera(1, test_intrinsics(), e));
  const DltSystem sys = build_dlt_system(exact_detections(rig, Vec3(0.1, 0.1, 1.1)), projections(rig));
  EXPECT_THROW(wls_solve(sys, WeightMatrix::uniform(2)), RankDeficient);
}

TEST(WlsSolve, WeightErrors) {
  Rig rig = ring(3);
  const DltSystem sys = build_dlt_system(exact_detections(rig, Vec3(0, 0, 1)), projections(rig));
  EXPECT_THROW(wls_solve(sys, WeightMatrix::from_camera_weights({0, 0, 0})), AllWeightsZero);
  EXPECT_THROW(wls_solve(sys, WeightMatrix::from_camera_weights({1, 0, 0})), RankDeficient);
  EXPECT_THROW(wls_solve(sys, WeightMatrix::from_camera_weights({1, -1, 1})), InvalidArgument);
  EXPECT_THROW(wls_solve(sys, WeightMatrix::from_camera_weights({1, 1})), InvalidArgument);
}

TEST(WlsSolve, MatchesNormalEquationOracleAndScaleInvariant) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ncam(2, 16);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = ncam(rng);
    DltSystem sys;
    sys.a.resize(2 * n, 3);
    sys.b.resize(2 * n);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      sys.camera_order.push_back(static_cast<CameraId>(i));
      w[i] = 0.05 + u(rng) * u(rng) + 1.0;
    }
    for (int r = 0; r < 2 * n; ++r) {
      sys.a.row(r) = Vec3(u(rng), u(rng), u(rng)).transpose() * 300.0;
      sys.b(r) = 500.0 * u(rng);
    }
    const WeightMatrix wm = WeightMatrix::from_camera_weights(w);
    const WlsSolution s = wls_solve(sys, wm);
    const Vec3 ref = oracle_wls(sys, wm.diag);
    EXPECT_LE((s.x - ref).norm(), 1e-9 * std::max(1.0, ref.norm()));

    std::vector<double> scaled = w;
    for (double& x : scaled) x *= 37.5;
    const WlsSolution t = wls_solve(sys, WeightMatrix::from_camera_weights(scaled));
    EXPECT_LE((t.x - s.x).norm(), 1e-12 * std::max(1.0, s.x.norm()));
  }
}

TEST(WeightingSegment, Mapping) {
  EXPECT_EQ(weighting_segment(JointId::kRightWrist), SegmentId::kRightForearm);
  EXPECT_EQ(weighting_segment(JointId::kLeftHip), SegmentId::kLeftUpperLeg);
  EXPECT_EQ(weighting_segment(JointId::kNeck), SegmentId::kChest);
  EXPECT_EQ(weighting_segment(JointId::kHips), SegmentId::kChest);
  EXPECT_EQ(weighting_segment(JointId::kLeftAnkle), SegmentId::kLeftLowerLeg);
}

TEST(CameraJointWeight, ModesAndPrior) {
  Rig rig = ring(4);
  const Camera& cam = rig.at(0);
  const Skeleton3D prior = to_skeleton3d(0.0, t_pose(Anthropometry{}, Vec2(0, 0), 0.0));
  const Detection2D det{100, 100, 0.8};
  const Detection2D low{100, 100, 0.2};

  WeightParams p;
  p.weight_mode = WeightMode::kUniform;
  EXPECT_EQ(camera_joint_weight(p, cam, JointId::kNeck, low, &prior), 1.0);
  p.weight_mode = WeightMode::kScoreOnly;
  EXPECT_EQ(camera_joint_weight(p, cam, JointId::kNeck, low, &prior), 0.0);
  EXPECT_NEAR(camera_joint_weight(p, cam, JointId::kNeck, det, &prior), 0.64, 1e-15);
  p.weight_mode = WeightMode::kAll;
  // No prior: both geometric factors default to 1.
  EXPECT_NEAR(camera_joint_weight(p, cam, JointId::kNeck, det, nullptr), 0.64, 1e-15);

  // With a prior: distance and orthogonality from the prior skeleton.
  const Vec3 x = prior.joints.at(JointId::kRightWrist).position;
  const double d = (x - cam.position()).norm();
  const Vec3 z = *segment_z_axis(prior, SegmentId::kRightForearm);
  const double expected =
      0.64 * (orthogonality_weight(cam.optical_axis(), z) + distance_weight(d, 1.0, 4.0)) / 2.0;
  EXPECT_NEAR(camera_joint_weight(p, cam, JointId::kRightWrist, det, &prior), expected, 1e-15);

  p.use_distance = false;
  p.use_orthogonality = false;
  EXPECT_NEAR(camera_joint_weight(p, cam, JointId::kRightWrist, det, &prior), 0.64, 1e-15);
}

std::map<CameraId, Skeleton2D> render(const Rig& rig, const JointPositions& joints,
                                      double score = 0.9) {
  std::map<CameraId, Skeleton2D> views;
  for (const auto& [id, cam] : rig) {
    Skeleton2D v;
    v.camera = id;
    v.timestamp = 0.5;
    for (JointId j : kAllJoints) {
      const Vec2 px = project(cam.projection(), joints[index_of(j)]).pixel;
      v.joints.set(j, Detection2D{px.x(), px.y(), score});
    }
    views[id] = v;
  }
  return views;
}

TEST(TriangulateSkeleton, NoiselessTPoseAnyMode) {
  Rig rig = ring(4);
  const JointPositions gt = t_pose(Anthropometry{}, Vec2(0.2, -0.1), 0.4);
  const auto views = render(rig, gt);
  const Skeleton3D prior = to_skeleton3d(0.0, gt);
  for (WeightMode m : {WeightMode::kUniform, WeightMode::kScoreOnly, WeightMode::kAll}) {
    WeightParams p;
    p.weight_mode = m;
    for (const Skeleton3D* pr : {static_cast<const Skeleton3D*>(nullptr), &prior}) {
      const Skeleton3D est = triangulate_skeleton(views, rig, p, pr);
      ASSERT_EQ(est.joints.size(), 14u);
      EXPECT_DOUBLE_EQ(est.timestamp, 0.5);
      est.joints.for_each([&](JointId j, const JointEstimate& e) {
        EXPECT_LT((e.position - gt[index_of(j)]).norm(), 1e-6) << joint_name(j);
        EXPECT_EQ(e.cameras_used, 4);
        EXPECT_LT(e.residual, 1e-6);
      });
    }
  }
}

TEST(TriangulateSkeleton, CorruptedArmOrdering) {
  Rig rig = ring(8);
  // Arms lie along world Y; camera 2 sits on +Y and sees them end-on.
  const JointPositions gt = t_pose(Anthropometry{}, Vec2(0, 0), 0.0);
  auto views = render(rig, gt);
  for (JointId j : {JointId::kLeftShoulder, JointId::kLeftElbow, JointId::kLeftWrist}) {
    Detection2D d = views[2].joints.at(j);
    d.u += 300.0;
    d.score = 0.9;
    views[2].joints.set(j, d);
  }
  const Skeleton3D prior = to_skeleton3d(0.0, gt);
  WeightParams uni;
  uni.weight_mode = WeightMode::kUniform;
  const WeightParams all;
  const Skeleton3D eu = triangulate_skeleton(views, rig, uni, &prior);
  const Skeleton3D ea = triangulate_skeleton(views, rig, all, &prior);
  for (JointId j : {JointId::kLeftShoulder, JointId::kLeftElbow, JointId::kLeftWrist}) {
    const double err_u = (eu.joints.at(j).position - gt[index_of(j)]).norm();
    const double err_a = (ea.joints.at(j).position - gt[index_of(j)]).norm();
    EXPECT_GT(err_u, err_a) << joint_name(j);
  }
}

TEST(TriangulateSkeleton, LowScoreJointOmitted) {
  Rig rig = ring(4);
  const JointPositions gt = t_pose(Anthropometry{}, Vec2(0, 0), 0.0);
  auto views = render(rig, gt);
  for (auto& [id, v] : views) {
    Detection2D d = v.joints.at(JointId::kRightKnee);
    d.score = 0.1;
    v.joints.set(JointId::kRightKnee, d);
  }
  // Only one camera sees the left ankle.
  for (CameraId id : {1u, 2u, 3u}) views[id].joints.erase(JointId::kLeftAnkle);
  const Skeleton3D est = triangulate_skeleton(views, rig, WeightParams{});
  EXPECT_FALSE(est.joints.contains(JointId::kRightKnee));
  EXPECT_FALSE(est.joints.contains(JointId::kLeftAnkle));
  EXPECT_EQ(est.joints.size(), 12u);

  WeightParams uni;
  uni.weight_mode = WeightMode::kUniform;
  EXPECT_TRUE(triangulate_skeleton(views, rig, uni).joints.contains(JointId::kRightKnee));
}

TEST(TriangulateSkeleton, InsufficientViews) {
  Rig rig = ring(4);
  auto views = render(rig, t_pose(Anthropometry{}, Vec2(0, 0), 0.0));
  std::map<CameraId, Skeleton2D> one = {{0, views[0]}};
  EXPECT_THROW(triangulate_skeleton(one, rig, WeightParams{}), InsufficientCameras);
  EXPECT_THROW(triangulate_skeleton({}, rig, WeightParams{}), InsufficientCameras);
}

TEST(TriangulateSkeleton, CamerasUsedAtLeastTwo) {
  Rig rig = ring(6);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::bernoulli_distribution drop(0.4);
  const JointPositions gt = t_pose(Anthropometry{}, Vec2(0, 0), 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto views = render(rig, gt);
    for (auto& [id, v] : views) {
      for (JointId j : kAllJoints) {
        if (drop(rng)) {
          v.joints.erase(j);
        } else {
          Detection2D d = v.joints.at(j);
          d.u += noise(rng);
          v.joints.set(j, d);
        }
      }
    }
    const Skeleton3D est = triangulate_skeleton(views, rig, WeightParams{});
    est.joints.for_each([](JointId, const JointEstimate& e) {
      EXPECT_GE(e.cameras_used, 2);
      EXPECT_TRUE(e.position.allFinite());
    });
  }
}

// One camera per scene is pushed far out and corrupts an arm at a low but
// admissible score. Medians over all joints of all scenes.
TEST(TriangulateSkeleton, MonotoneRobustnessOverRandomScenes) {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  const std::vector<WeightMode> modes = {WeightMode::kUniform, WeightMode::kScoreOnly,
                                         WeightMode::kAll};
  std::vector<std::vector<double>> errors(modes.size());
  for (int scene = 0; scene < 100; ++scene) {
    SceneConfig cfg;
    cfg.seed = 1000 + scene;
    cfg.rig.count = 6;
    cfg.motion.duration = 0.1;
    cfg.motion.heading = 2.0 * kPi * u(rng);
    cfg.noise.pixel_sigma = 1.0;
    const int bad = pick(rng);
    const double az = 2.0 * kPi * u(rng);
    const double range = 8.0 + 4.0 * u(rng);
    cfg.rig.overrides.push_back(
        {static_cast<CameraId>(bad), Vec3(range * std::cos(az), range * std::sin(az), 1.5),
         Vec3(0, 0, 1)});
    const bool right = u(rng) < 0.5;
    cfg.occlusions.push_back(
        {static_cast<CameraId>(bad),
         right ? std::vector<JointId>{JointId::kRightElbow, JointId::kRightWrist}
               : std::vector<JointId>{JointId::kLeftElbow, JointId::kLeftWrist},
         0.0, 1e300, OcclusionMode::kCorrupt, 60.0, 0.5});
    const Rig rig = build_rig(cfg.rig);
    const auto gt = generate_ground_truth(cfg);
    const auto groups = group_by_timestamp(render_detections(gt, rig, cfg), 1e-3);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      WeightParams p;
      p.weight_mode = modes[m];
      const Skeleton3D last = triangulate_sequence(groups, rig, p).back();
      for (JointId j : kAllJoints) {
        ASSERT_NE(last.position(j), nullptr);
        errors[m].push_back((*last.position(j) - gt.back().joints[index_of(j)]).norm());
      }
    }
  }
  std::vector<double> median(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    auto& e = errors[m];
    std::nth_element(e.begin(), e.begin() + e.size() / 2, e.end());
    median[m] = e[e.size() / 2];
  }
  EXPECT_LE(median[1], median[0]);
  EXPECT_LE(median[2], median[1]);
}

}  // namespace
}  // namespace mvpose
