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

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mvpose/error.h"

namespace mvpose {
namespace {

struct Observation {
  CameraId camera;
  const ProjectionMatrix* projection;
  Detection2D detection;
  double weight;
};

DltSystem assemble(const std::vector<Observation>& obs) {
  DltSystem sys;
  const Eigen::Index k = static_cast<Eigen::Index>(obs.size());
  sys.a.resize(2 * k, 3);
  sys.b.resize(2 * k);
  sys.camera_order.reserve(obs.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    const Observation& o = obs[static_cast<std::size_t>(i)];
    const Mat34& m = o.projection->matrix();
    const double u = o.detection.u;
    const double v = o.detection.v;
    sys.a.row(2 * i) = u * m.block<1, 3>(2, 0) - m.block<1, 3>(0, 0);
    sys.b(2 * i) = m(0, 3) - u * m(2, 3);
    sys.a.row(2 * i + 1) = v * m.block<1, 3>(2, 0) - m.block<1, 3>(1, 0);
    sys.b(2 * i + 1) = m(1, 3) - v * m(2, 3);
    sys.camera_order.push_back(o.camera);
  }
  return sys;
}

using SegmentAxes = std::array<std::optional<Vec3>, kAllSegments.size()>;

SegmentAxes prior_axes(const Skeleton3D* prior) {
  SegmentAxes axes{};
  if (!prior) return axes;
  for (SegmentId s : kAllSegments) {
    axes[static_cast<std::size_t>(s)] = segment_z_axis(*prior, s);
  }
  return axes;
}

double weight_for(const WeightParams& params, const Camera& camera, JointId joint,
                  const Detection2D& det, const Skeleton3D* prior, const SegmentAxes& axes) {
  switch (params.weight_mode) {
    case WeightMode::kUniform:
      return 1.0;
    case WeightMode::kScoreOnly:
      return score_weight(det.score, params.s_th);
    case WeightMode::kAll:
      break;
  }
  const double ws = score_weight(det.score, params.s_th);
  if (ws == 0.0) return 0.0;

  double wd = 1.0;
  if (params.use_distance && prior) {
    if (const Vec3* p = prior->position(joint)) {
      wd = distance_weight((*p - camera.position()).norm(), params.d_min, params.d_max);
    }
  }
  double wo = 1.0;
  if (params.use_orthogonality) {
    const auto& axis = axes[static_cast<std::size_t>(weighting_segment(joint))];
    if (axis) wo = orthogonality_weight(camera.optical_axis(), *axis);
  }
  return combine_weights(ws, wo, wd);
}

double reprojection_rms(const Vec3& x, const std::vector<Observation>& obs) {
  double num = 0.0;
  double den = 0.0;
  for (const Observation& o : obs) {
    const Vec3 h = o.projection->matrix() * x.homogeneous();
    if (!(std::abs(h.z()) > kMinDepth)) continue;
    const Vec2 px(h.x() / h.z(), h.y() / h.z());
    num += o.weight * (px - o.detection.pixel()).squaredNorm();
    den += o.weight;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

}  // namespace

WeightMatrix WeightMatrix::from_camera_weights(const std::vector<double>& per_camera) {
  WeightMatrix w;
  w.diag.resize(2 * static_cast<Eigen::Index>(per_camera.size()));
  for (std::size_t i = 0; i < per_camera.size(); ++i) {
    w.diag(2 * static_cast<Eigen::Index>(i)) = per_camera[i];
    w.diag(2 * static_cast<Eigen::Index>(i) + 1) = per_camera[i];
  }
  return w;
}

WeightMatrix WeightMatrix::uniform(std::size_t cameras) {
  return from_camera_weights(std::vector<double>(cameras, 1.0));
}

DltSystem build_dlt_system(const std::map<CameraId, Detection2D>& detections,
                           const std::map<CameraId, ProjectionMatrix>& cameras) {
  std::vector<Observation> obs;
  for (const auto& [id, det] : detections) {
    auto it = cameras.find(id);
    if (it == cameras.end()) continue;
    obs.push_back(Observation{id, &it->second, det, 1.0});
  }
  if (obs.size() < 2) {
    throw InsufficientCameras("DLT system needs at least two cameras, got " +
                              std::to_string(obs.size()));
  }
  return assemble(obs);
}

WlsSolution wls_solve(const DltSystem& sys, const WeightMatrix& w) {
  const Eigen::Index rows = sys.a.rows();
  if (rows % 2 != 0 || sys.b.size() != rows || w.diag.size() != rows ||
      static_cast<std::size_t>(rows / 2) != sys.camera_order.size()) {
    throw InvalidArgument("wls_solve: inconsistent system dimensions");
  }

  Mat3 normal = Mat3::Zero();
  Vec3 rhs = Vec3::Zero();
  double weight_sum = 0.0;
  int weighted_cameras = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double wi = w.diag(i);
    if (!(wi >= 0.0) || !std::isfinite(wi)) {
      throw InvalidArgument("wls_solve: weights must be finite and non-negative");
    }
    if (wi == 0.0) continue;
    const Eigen::RowVector3d ai = sys.a.row(i);
    normal.noalias() += wi * ai.transpose() * ai;
    rhs.noalias() += (wi * sys.b(i)) * ai.transpose();
    weight_sum += wi;
    if (i % 2 == 0) ++weighted_cameras;
  }
  if (weight_sum == 0.0) throw AllWeightsZero("wls_solve: every weight is zero");
  if (weighted_cameras < 2) {
    throw RankDeficient("wls_solve: fewer than two cameras carry weight");
  }

  Eigen::SelfAdjointEigenSolver<Mat3> eig(normal, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(2);
  if (!(lo > 0.0) || hi / lo > kMaxNormalCondition) {
    throw RankDeficient("wls_solve: normal matrix singular or ill conditioned");
  }

  WlsSolution sol;
  sol.x = normal.llt().solve(rhs);

  double weighted_sq = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double wi = w.diag(i);
    if (wi == 0.0) continue;
    const double r = sys.a.row(i).dot(sol.x) - sys.b(i);
    weighted_sq += wi * r * r;
  }
  sol.residual = std::sqrt(weighted_sq / weight_sum);
  return sol;
}

SegmentId weighting_segment(JointId j) {
  switch (j) {
    case JointId::kNeck:
    case JointId::kHips:
      return SegmentId::kChest;
    case JointId::kRightShoulder:
      return SegmentId::kRightUpperArm;
    case JointId::kRightElbow:
    case JointId::kRightWrist:
      return SegmentId::kRightForearm;
    case JointId::kLeftShoulder:
      return SegmentId::kLeftUpperArm;
    case JointId::kLeftElbow:
    case JointId::kLeftWrist:
      return SegmentId::kLeftForearm;
    case JointId::kRightHip:
      return SegmentId::kRightUpperLeg;
    case JointId::kRightKnee:
    case JointId::kRightAnkle:
      return SegmentId::kRightLowerLeg;
    case JointId::kLeftHip:
      return SegmentId::kLeftUpperLeg;
    case JointId::kLeftKnee:
    case JointId::kLeftAnkle:
      return SegmentId::kLeftLowerLeg;
  }
  return SegmentId::kChest;
}

double camera_joint_weight(const WeightParams& params, const Camera& camera, JointId joint,
                           const Detection2D& detection, const Skeleton3D* prior) {
  return weight_for(params, camera, joint, detection, prior, prior_axes(prior));
}

Skeleton3D triangulate_skeleton(const std::map<CameraId, Skeleton2D>& views, const Rig& rig,
                                const WeightParams& params, const Skeleton3D* prior) {
  std::vector<std::pair<const Camera*, const Skeleton2D*>> usable;
  for (const auto& [id, view] : views) {
    auto it = rig.find(id);
    if (it != rig.end()) usable.emplace_back(&it->second, &view);
  }
  if (usable.size() < 2) {
    throw InsufficientCameras("triangulation needs at least two views, got " +
                              std::to_string(usable.size()));
  }

  const SegmentAxes axes =
      params.weight_mode == WeightMode::kAll ? prior_axes(prior) : SegmentAxes{};

  Skeleton3D out;
  out.timestamp = usable.front().second->timestamp;
  for (const auto& [cam, view] : usable) out.timestamp = std::max(out.timestamp, view->timestamp);

  std::vector<Observation> obs;
  obs.reserve(usable.size());
  for (JointId joint : kAllJoints) {
    obs.clear();
    for (const auto& [cam, view] : usable) {
      const Detection2D* det = view->joints.find(joint);
      if (!det) continue;
      const double w = weight_for(params, *cam, joint, *det, prior, axes);
      if (w > 0.0) obs.push_back(Observation{cam->id(), &cam->projection(), *det, w});
    }
    if (obs.size() < 2) continue;

    std::vector<double> per_camera;
    per_camera.reserve(obs.size());
    for (const Observation& o : obs) per_camera.push_back(o.weight);

    WlsSolution sol;
    try {
      sol = wls_solve(assemble(obs), WeightMatrix::from_camera_weights(per_camera));
    } catch (const RankDeficient&) {
      continue;
    } catch (const AllWeightsZero&) {
      continue;
    }
    if (!sol.x.allFinite()) continue;
    out.joints.set(joint, JointEstimate{sol.x, reprojection_rms(sol.x, obs),
                                        static_cast<int>(obs.size())});
  }
  return out;
}

}  // namespace mvpose
