#include "flightline/fiducial/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace flightline::fiducial {

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::compose(const Pose& other) const {
  Pose out;
  out.rotation = rotation * other.rotation;
  out.translation = rotation * other.translation + translation;
  return out;
}

void validate(const Pose& pose, double tol) {
  if (!pose.rotation.allFinite() || !pose.translation.allFinite()) {
    throw FiducialError(FiducialError::Kind::kInvalid, "pose has non-finite entries");
  }
  const double ortho = (pose.rotation.transpose() * pose.rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > tol || std::abs(pose.rotation.determinant() - 1.0) > tol) {
    throw FiducialError(FiducialError::Kind::kInvalid, "pose rotation is not a proper rotation");
  }
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  // ||a - b||_F = 2*sqrt(2)*sin(theta/2) for rotations a, b.
  const double chord = (a - b).norm() / (2.0 * std::numbers::sqrt2);
  return 2.0 * std::asin(std::min(1.0, chord));
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

Pose camera_pose_looking(const Vec3& center_enu, double yaw_rad, double pitch_rad) {
  const Vec3 forward(std::sin(yaw_rad) * std::cos(pitch_rad), std::cos(yaw_rad) * std::cos(pitch_rad),
                     -std::sin(pitch_rad));
  const Vec3 right(std::cos(yaw_rad), -std::sin(yaw_rad), 0.0);
  const Vec3 down = forward.cross(right);
  Pose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = center_enu;
  return pose;
}

CameraIntrinsics::CameraIntrinsics(int rh, int rv, double hfov, double focal)
    : resolution_h_(rh),
      resolution_v_(rv),
      hfov_rad_(hfov),
      fx_(focal),
      fy_(focal),
      cx_(rh / 2.0),
      cy_(rv / 2.0) {}

CameraIntrinsics CameraIntrinsics::from_fov(int resolution_h, int resolution_v, double hfov_rad) {
  if (resolution_h <= 0 || resolution_v <= 0) {
    throw FiducialError(FiducialError::Kind::kInvalid, "camera resolution must be positive");
  }
  if (!(hfov_rad > 0.0 && hfov_rad < std::numbers::pi)) {
    throw FiducialError(FiducialError::Kind::kInvalid, "horizontal FOV must be in (0, pi)");
  }
  const double focal = (resolution_h / 2.0) / std::tan(hfov_rad / 2.0);
  return CameraIntrinsics(resolution_h, resolution_v, hfov_rad, focal);
}

CameraIntrinsics CameraIntrinsics::from_focal(int resolution_h, int resolution_v, double focal_px) {
  if (resolution_h <= 0 || resolution_v <= 0) {
    throw FiducialError(FiducialError::Kind::kInvalid, "camera resolution must be positive");
  }
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
    throw FiducialError(FiducialError::Kind::kInvalid, "focal length must be positive");
  }
  const double hfov = 2.0 * std::atan((resolution_h / 2.0) / focal_px);
  return CameraIntrinsics(resolution_h, resolution_v, hfov, focal_px);
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx_, 0.0, cx_, 0.0, fy_, cy_, 0.0, 0.0, 1.0;
  return k;
}

bool CameraIntrinsics::in_frame(const Vec2& px) const noexcept {
  return px.x() >= 0.0 && px.x() <= resolution_h_ && px.y() >= 0.0 && px.y() <= resolution_v_;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

void validate(const TagDetection& det) {
  if (!(det.tag_size_m > 0.0) || !std::isfinite(det.tag_size_m)) {
    throw FiducialError(FiducialError::Kind::kInvalid, "tag size must be positive");
  }
  double scale = 0.0;
  for (const auto& c : det.corners_px) {
    if (!c.allFinite()) throw FiducialError(FiducialError::Kind::kInvalid, "non-finite corner");
    scale = std::max(scale, (c - det.corners_px[0]).norm());
  }
  const double eps = 1e-12 * std::max(1.0, scale * scale);
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = det.corners_px[i];
    const Vec2& b = det.corners_px[(i + 1) % 4];
    const Vec2& c = det.corners_px[(i + 2) % 4];
    const double z = cross2(b - a, c - b);
    if (std::abs(z) <= eps) {
      throw FiducialError(FiducialError::Kind::kInvalid, "tag corners are collinear");
    }
    const int s = z > 0 ? 1 : -1;
    if (sign != 0 && s != sign) {
      throw FiducialError(FiducialError::Kind::kInvalid, "tag corners are not convex");
    }
    sign = s;
  }
}

Vec3 tag_corner(int i, double size) {
  static constexpr double kSigns[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  return {kSigns[i][0] * size / 2.0, kSigns[i][1] * size / 2.0, 0.0};
}

std::optional<Vec2> project(const CameraIntrinsics& cam, const Pose& camera_pose,
                            const geo::EnuPoint& world_point) {
  const Vec3 x = camera_pose.rotation.transpose() * (to_vec(world_point) - camera_pose.translation);
  if (x.z() <= 1e-9) return std::nullopt;
  return Vec2(cam.fx() * x.x() / x.z() + cam.cx(), cam.fy() * x.y() / x.z() + cam.cy());
}

std::optional<TagDetection> project_tag(const CameraIntrinsics& cam, const Pose& camera_pose,
                                        const Pose& tag_pose, double tag_size_m, int tag_id) {
  if (!(tag_size_m > 0.0)) {
    throw FiducialError(FiducialError::Kind::kInvalid, "tag size must be positive");
  }
  // Tags are printed on one side: the tag z axis must point away from the camera.
  if ((tag_pose.translation - camera_pose.translation).dot(tag_pose.rotation.col(2)) <= 0.0) {
    return std::nullopt;
  }
  TagDetection det;
  det.tag_id = tag_id;
  det.tag_size_m = tag_size_m;
  for (int i = 0; i < 4; ++i) {
    const auto px = project(cam, camera_pose, to_enu(tag_pose.apply(tag_corner(i, tag_size_m))));
    if (!px || !cam.in_frame(*px)) return std::nullopt;
    det.corners_px[i] = *px;
  }
  return det;
}

geo::EnuPoint tag_world_position(const Pose& camera_pose, const Pose& tag_pose_in_camera) {
  return to_enu(camera_pose.rotation * tag_pose_in_camera.translation + camera_pose.translation);
}

}  // namespace flightline::fiducial
