#pragma once

#include <optional>
#include <span>

#include "flightline/fiducial/geometry.hpp"

namespace flightline::fiducial {

/// Surveyed world point and where it appears in the image.
struct CalibrationPoint {
  geo::EnuPoint world;
  Vec2 pixel;
};

/// 3x4 camera matrix, stored with the first three entries of the last row at
/// unit norm and det of the left 3x3 block positive, so the third homogeneous
/// coordinate of a projected point is its depth.
class ProjectionMatrix {
 public:
  /// Normalizes `m`. Throws FiducialError(kSingular) if the last row's leading block is zero.
  explicit ProjectionMatrix(const Mat34& m);

  /// P = K [Rᵀ | -Rᵀ C] for a camera posed at C with camera-to-world rotation R.
  static ProjectionMatrix from_camera(const CameraIntrinsics& cam, const Pose& camera_pose);

  const Mat34& matrix() const noexcept { return m_; }

  /// nullopt for points at or behind the camera plane.
  std::optional<Vec2> project(const Vec3& world) const;

 private:
  Mat34 m_;
};

/// Projects through a raw (unnormalized) matrix; any nonzero scale gives the same pixel.
std::optional<Vec2> project_homogeneous(const Mat34& p, const Vec3& world);

struct CalibrationResult {
  ProjectionMatrix projection;
  double reprojection_rms_px = 0.0;
};

/// Direct linear transform with Hartley conditioning of both point sets.
/// Needs at least six non-coplanar points; throws FiducialError(kArity) or
/// FiducialError(kRankDeficient) otherwise.
CalibrationResult dlt_calibrate(std::span<const CalibrationPoint> points);

/// C = -M⁻¹ p4. Throws FiducialError(kSingular) when M is singular.
geo::EnuPoint camera_center(const ProjectionMatrix& p);

/// Splits a calibrated P into a camera pose, given the camera's intrinsics.
Pose camera_pose_from_projection(const ProjectionMatrix& p, const CameraIntrinsics& cam);

}  // namespace flightline::fiducial
