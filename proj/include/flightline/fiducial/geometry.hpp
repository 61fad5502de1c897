#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "flightline/geodesy/geodesy.hpp"

namespace flightline::fiducial {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

class FiducialError : public std::runtime_error {
 public:
  enum class Kind {
    kDomain,         // formula argument outside its domain
    kInvalid,        // malformed input (non-convex quad, bad intrinsics, ...)
    kSingular,       // degenerate homography / projection block
    kDegenerate,     // tag plane passes through the camera center
    kRankDeficient,  // DLT point configuration does not pin down P
    kArity,          // too few points
    kEmptyFamily,    // no codeword satisfies the family constraints
  };

  FiducialError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline Vec3 to_vec(const geo::EnuPoint& p) { return {p.east_m, p.north_m, p.up_m}; }
inline geo::EnuPoint to_enu(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

/// Rigid transform. For a camera pose, `rotation` maps camera axes into the world
/// and `translation` is the camera center; for a tag pose in camera coordinates
/// it maps tag-frame points into the camera frame.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  /// this ∘ other: first other, then this.
  Pose compose(const Pose& other) const;
};

/// Throws FiducialError(kInvalid) unless RᵀR = I and det R = 1 within `tol`.
void validate(const Pose& pose, double tol = 1e-9);

/// Angle of the relative rotation a·bᵀ, in radians. Stable near zero.
double rotation_distance(const Mat3& a, const Mat3& b);

/// Nearest rotation matrix (Frobenius norm) to `m`, via its orthogonal polar factor.
Mat3 nearest_rotation(const Mat3& m);

/// Camera-frame convention: x right, y down, z along the optical axis.
/// Yaw is the compass bearing of the optical axis (0 = north, 90 = east), pitch
/// tilts the axis below the horizon.
Pose camera_pose_looking(const Vec3& center_enu, double yaw_rad, double pitch_rad);

/// Pinhole intrinsics with square pixels and centered principal point.
class CameraIntrinsics {
 public:
  static CameraIntrinsics from_fov(int resolution_h, int resolution_v, double hfov_rad);
  static CameraIntrinsics from_focal(int resolution_h, int resolution_v, double focal_px);

  int resolution_h() const noexcept { return resolution_h_; }
  int resolution_v() const noexcept { return resolution_v_; }
  double hfov_rad() const noexcept { return hfov_rad_; }
  double fx() const noexcept { return fx_; }
  double fy() const noexcept { return fy_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }

  Mat3 matrix() const;
  bool in_frame(const Vec2& px) const noexcept;

 private:
  CameraIntrinsics(int rh, int rv, double hfov, double focal);

  int resolution_h_;
  int resolution_v_;
  double hfov_rad_;
  double fx_, fy_, cx_, cy_;
};

/// Four corners in tag-frame order (-s/2,-s/2), (s/2,-s/2), (s/2,s/2), (-s/2,s/2).
struct TagDetection {
  int tag_id = 0;
  std::array<Vec2, 4> corners_px;
  double tag_size_m = 0.0;
};

/// Throws FiducialError(kInvalid) unless the corners form a strictly convex
/// quadrilateral and the size is positive.
void validate(const TagDetection& det);

/// Corner `i` of a tag of side `size` in its own frame (z = 0).
Vec3 tag_corner(int i, double size);

/// Pinhole projection; nullopt when the point is behind (or on) the camera plane.
std::optional<Vec2> project(const CameraIntrinsics& cam, const Pose& camera_pose,
                            const geo::EnuPoint& world_point);

/// Synthetic detector: projects the four corners of a tag posed in the world.
/// nullopt when the tag faces away, or any corner is behind the camera or outside the image.
std::optional<TagDetection> project_tag(const CameraIntrinsics& cam, const Pose& camera_pose,
                                        const Pose& tag_pose, double tag_size_m, int tag_id = 0);

/// World position of a tag seen from a posed camera: R_cam·t_tag + C_cam.
geo::EnuPoint tag_world_position(const Pose& camera_pose, const Pose& tag_pose_in_camera);

}  // namespace flightline::fiducial
