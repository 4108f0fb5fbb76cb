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

#include "mvpose/geometry.h"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "mvpose/error.h"

namespace mvpose {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvariantViolation("camera intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw InvariantViolation("camera intrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw InvariantViolation("camera intrinsics: principal point outside the image");
  }
}

Mat34 CameraIntrinsics::matrix() const {
  Mat34 k = Mat34::Zero();
  k(0, 0) = fx;
  k(0, 2) = cx;
  k(1, 1) = fy;
  k(1, 2) = cy;
  k(2, 2) = 1.0;
  return k;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho = (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

void CameraExtrinsics::validate() const {
  if (!is_rotation(rotation)) {
    throw InvariantViolation("camera extrinsics: rotation is not orthonormal with det +1");
  }
  if (!translation.allFinite()) {
    throw InvariantViolation("camera extrinsics: non-finite translation");
  }
}

Mat4 CameraExtrinsics::matrix() const {
  Mat4 t = Mat4::Identity();
  t.block<3, 3>(0, 0) = rotation;
  t.block<3, 1>(0, 3) = translation;
  return t;
}

Mat4 CameraExtrinsics::inverse_matrix() const {
  Mat4 t = Mat4::Identity();
  t.block<3, 3>(0, 0) = rotation.transpose();
  t.block<3, 1>(0, 3) = -rotation.transpose() * translation;
  return t;
}

ProjectionMatrix projection_matrix(const CameraIntrinsics& intr,
                                   const CameraExtrinsics& extr) {
  intr.validate();
  extr.validate();
  return ProjectionMatrix(intr.matrix() * extr.inverse_matrix());
}

Projection project(const ProjectionMatrix& m, const Vec3& x) {
  const Vec3 h = m.matrix() * x.homogeneous();
  if (!(std::abs(h.z()) > kMinDepth)) {
    throw DegenerateDepth("point lies on the camera principal plane");
  }
  return Projection{Vec2(h.x() / h.z(), h.y() / h.z()), h.z()};
}

Vec3 optical_axis(const CameraExtrinsics& extr) {
  extr.validate();
  return extr.rotation.col(2).normalized();
}

CameraExtrinsics look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
  const Vec3 forward = target - position;
  if (forward.norm() < 1e-12) {
    throw InvalidArgument("look_at: target coincides with camera position");
  }
  const Vec3 z = forward.normalized();
  const Vec3 right = z.cross(up);
  if (right.norm() < 1e-12) {
    throw InvalidArgument("look_at: viewing direction parallel to up vector");
  }
  const Vec3 x = right.normalized();
  const Vec3 y = z.cross(x);

  CameraExtrinsics extr;
  extr.rotation.col(0) = x;
  extr.rotation.col(1) = y;
  extr.rotation.col(2) = z;
  extr.translation = position;
  return extr;
}

Camera::Camera(CameraId id, const CameraIntrinsics& intr, const CameraExtrinsics& extr)
    : id_(id),
      intrinsics_(intr),
      extrinsics_(extr),
      projection_(projection_matrix(intr, extr)) {}

bool Camera::in_image(const Vec2& pixel) const {
  return pixel.x() >= 0.0 && pixel.x() < intrinsics_.width && pixel.y() >= 0.0 &&
         pixel.y() < intrinsics_.height;
}

}  // namespace mvpose
