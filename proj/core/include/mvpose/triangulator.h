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

// Multi-view joint triangulation by weighted least squares over the linear
// (DLT) form of the pinhole equation.
//
// For a camera with projection rows m1, m2, m3 (each = [r | o]) observing a
// joint at pixel (u, v), eliminating the unknown depth gives two equations
//
//   (u r3 - r1) . x = o1 - u o3
//   (v r3 - r2) . x = o2 - v o3
//
// Stacking them over cameras yields A x = b, solved as
// x = (A^T W A)^{-1} A^T W b with W = diag(w_1, w_1, w_2, w_2, ...).

#ifndef MVPOSE_TRIANGULATOR_H_
#define MVPOSE_TRIANGULATOR_H_

#include <map>
#include <vector>

#include <Eigen/Core>

#include "mvpose/geometry.h"
#include "mvpose/segment_frames.h"
#include "mvpose/skeleton.h"
#include "mvpose/weights.h"

namespace mvpose {

// Condition number limit on A^T W A.
inline constexpr double kMaxNormalCondition = 1e12;

struct DltSystem {
  Eigen::Matrix<double, Eigen::Dynamic, 3> a;
  Eigen::VectorXd b;
  std::vector<CameraId> camera_order;  // rows 2i, 2i+1 come from camera_order[i]

  std::size_t camera_count() const { return camera_order.size(); }
};

// Per-row weights; each camera's weight appears twice.
struct WeightMatrix {
  Eigen::VectorXd diag;

  static WeightMatrix from_camera_weights(const std::vector<double>& per_camera);
  static WeightMatrix uniform(std::size_t cameras);
  double camera_weight(std::size_t i) const { return diag(2 * i); }
};

// Uses every camera present in both maps, in ascending id order.
// Throws InsufficientCameras when fewer than two remain.
DltSystem build_dlt_system(const std::map<CameraId, Detection2D>& detections,
                           const std::map<CameraId, ProjectionMatrix>& cameras);

struct WlsSolution {
  Vec3 x = Vec3::Zero();
  double residual = 0.0;  // sqrt(sum w r^2 / sum w) over the algebraic rows
};

// Throws AllWeightsZero, RankDeficient (singular or ill-conditioned normal
// matrix, or fewer than two cameras carrying weight), InvalidArgument on
// size mismatch or negative weights.
WlsSolution wls_solve(const DltSystem& sys, const WeightMatrix& w);

// Segment whose longitudinal axis drives the orthogonality weight of a joint.
SegmentId weighting_segment(JointId j);

// Weight of one camera for one joint under `params`. `prior` supplies the
// distance and orientation cues; factors it cannot supply default to 1.
double camera_joint_weight(const WeightParams& params, const Camera& camera, JointId joint,
                           const Detection2D& detection, const Skeleton3D* prior);

// Triangulates every joint seen by at least two usable cameras. Joints
// with fewer, or with a degenerate system, are omitted. The output timestamp
// is the latest view timestamp.
// Throws InsufficientCameras when fewer than two views match rig cameras.
Skeleton3D triangulate_skeleton(const std::map<CameraId, Skeleton2D>& views, const Rig& rig,
                                const WeightParams& params, const Skeleton3D* prior = nullptr);

}  // namespace mvpose

#endif  // MVPOSE_TRIANGULATOR_H_
