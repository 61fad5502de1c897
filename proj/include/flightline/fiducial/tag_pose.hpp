#pragma once

#include "flightline/fiducial/geometry.hpp"

namespace flightline::fiducial {

/// Plane-to-image homography of a detected tag: maps tag-frame (x, y, 1) with
/// corners at (±s/2, ±s/2) onto the four pixel corners. Exact 4-point solution,
/// normalized so H(2,2) = 1. Throws FiducialError(kSingular) for degenerate corners.
Mat3 homography_from_corners(const TagDetection& det);

/// Applies H to a tag-plane point.
Vec2 apply_homography(const Mat3& h, const Vec2& plane_xy);

/// Tag pose in the camera frame recovered from its homography. The rotation is
/// the polar factor of [r1 r2 r1×r2]; the sign is fixed so the tag lies in front
/// of the camera. Throws FiducialError(kDegenerate) when no such pose exists.
Pose pose_from_homography(const Mat3& h, const CameraIntrinsics& cam);

struct TagPoseEstimate {
  Pose tag_in_camera;
  double reprojection_rms_px = 0.0;
};

/// homography_from_corners + pose_from_homography, with the corner reprojection RMS.
TagPoseEstimate estimate_tag_pose(const TagDetection& det, const CameraIntrinsics& cam);

}  // namespace flightline::fiducial
