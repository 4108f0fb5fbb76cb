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

// Pinhole camera model: intrinsics, camera-to-world pose, the 3x4 projection
// matrix and forward projection. No lens distortion is modeled.

#ifndef MVPOSE_GEOMETRY_H_
#define MVPOSE_GEOMETRY_H_

#include <cstdint>
#include <map>

#include <Eigen/Dense>

namespace mvpose {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

using CameraId = std::uint32_t;

inline constexpr double kOrthonormalTolerance = 1e-9;
inline constexpr double kMinDepth = 1e-9;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;  // principal point, pixels from the top-left corner
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws InvariantViolation unless fx, fy > 0 and the principal point lies
  // inside the image.
  void validate() const;

  // The 3x4 matrix [K | 0].
  Mat34 matrix() const;
};

// Pose of the camera frame expressed in the world frame (camera-to-world).
// Camera frame convention: +X right, +Y down, +Z along the optical axis.
struct CameraExtrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  // Throws InvariantViolation if ||R R^T - I|| or |det R - 1| exceed
  // kOrthonormalTolerance (max-abs entry norm).
  void validate() const;

  // 4x4 homogeneous camera-to-world transform.
  Mat4 matrix() const;
  // World-to-camera transform [R^T, -R^T t; 0, 1].
  Mat4 inverse_matrix() const;
};

bool is_rotation(const Mat3& r, double tol = kOrthonormalTolerance);

class ProjectionMatrix {
 public:
  ProjectionMatrix() : m_(Mat34::Zero()) {}
  explicit ProjectionMatrix(const Mat34& m) : m_(m) {}

  const Mat34& matrix() const { return m_; }
  // Row r split into its rotational part (first three entries) and offset.
  Eigen::Vector3d row_direction(int r) const { return m_.block<1, 3>(r, 0).transpose(); }
  double row_offset(int r) const { return m_(r, 3); }

 private:
  Mat34 m_;
};

// K * T^{-1}, with the rigid inverse computed in closed form.
// Throws InvariantViolation on non-orthonormal rotation or invalid intrinsics.
ProjectionMatrix projection_matrix(const CameraIntrinsics& intr,
                                   const CameraExtrinsics& extr);

struct Projection {
  Vec2 pixel;
  double depth = 0.0;  // third homogeneous coordinate; scales with M
  bool behind_camera() const { return depth < 0.0; }
};

// Throws DegenerateDepth when |depth| <= kMinDepth.
Projection project(const ProjectionMatrix& m, const Vec3& x);

// Camera +Z expressed in world coordinates.
Vec3 optical_axis(const CameraExtrinsics& extr);

// Camera at `position` looking at `target`, image +Y aligned with -`up`.
// Throws InvalidArgument if target coincides with position or the viewing
// direction is parallel to `up`.
CameraExtrinsics look_at(const Vec3& position, const Vec3& target,
                         const Vec3& up = Vec3::UnitZ());

// A calibrated camera in a rig. The projection matrix is derived once at
// construction.
class Camera {
 public:
  Camera(CameraId id, const CameraIntrinsics& intr, const CameraExtrinsics& extr);

  CameraId id() const { return id_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  const CameraExtrinsics& extrinsics() const { return extrinsics_; }
  const ProjectionMatrix& projection() const { return projection_; }
  const Vec3& position() const { return extrinsics_.translation; }
  Vec3 optical_axis() const { return mvpose::optical_axis(extrinsics_); }

  bool in_image(const Vec2& pixel) const;

 private:
  CameraId id_;
  CameraIntrinsics intrinsics_;
  CameraExtrinsics extrinsics_;
  ProjectionMatrix projection_;
};

using Rig = std::map<CameraId, Camera>;

}  // namespace mvpose

#endif  // MVPOSE_GEOMETRY_H_
