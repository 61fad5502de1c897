#include "flightline/fiducial/tag_pose.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace flightline::fiducial {
namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;

// Gaussian elimination with partial pivoting. Returns false on a (numerically) zero pivot.
bool solve_linear(Mat8 a, Vec8 b, Vec8& x) {
  const double scale = a.cwiseAbs().maxCoeff();
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) <= 1e-12 * scale) return false;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b(pivot), b(col));
    }
    for (int r = col + 1; r < 8; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      a.row(r).tail(8 - col) -= f * a.row(col).tail(8 - col);
      b(r) -= f * b(col);
    }
  }
  for (int r = 7; r >= 0; --r) {
    double acc = b(r);
    for (int c = r + 1; c < 8; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return true;
}

}  // namespace

Mat3 homography_from_corners(const TagDetection& det) {
  try {
    validate(det);
  } catch (const FiducialError& e) {
    throw FiducialError(FiducialError::Kind::kSingular, e.what());
  }

  // Pixel conditioning: centroid to origin, mean distance sqrt(2).
  Vec2 centroid = Vec2::Zero();
  for (const auto& c : det.corners_px) centroid += c / 4.0;
  double mean_dist = 0.0;
  for (const auto& c : det.corners_px) mean_dist += (c - centroid).norm() / 4.0;
  const double s = std::sqrt(2.0) / mean_dist;
  Mat3 pixel_norm;
  pixel_norm << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  Mat3 pixel_denorm;
  pixel_denorm << 1 / s, 0, centroid.x(), 0, 1 / s, centroid.y(), 0, 0, 1;
  // Tag plane: corners at (±1, ±1).
  const double half = det.tag_size_m / 2.0;
  Mat3 plane_norm;
  plane_norm << 1 / half, 0, 0, 0, 1 / half, 0, 0, 0, 1;

  Mat8 a = Mat8::Zero();
  Vec8 b;
  for (int i = 0; i < 4; ++i) {
    const Vec3 corner = tag_corner(i, 2.0);
    const double x = corner.x();
    const double y = corner.y();
    const double u = s * (det.corners_px[i].x() - centroid.x());
    const double v = s * (det.corners_px[i].y() - centroid.y());
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  Vec8 h;
  if (!solve_linear(a, b, h)) {
    throw FiducialError(FiducialError::Kind::kSingular, "tag corners give a singular homography");
  }
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  Mat3 out = pixel_denorm * hn * plane_norm;
  if (std::abs(out(2, 2)) < 1e-15 * out.cwiseAbs().maxCoeff()) {
    throw FiducialError(FiducialError::Kind::kSingular, "homography maps the tag center to infinity");
  }
  return out / out(2, 2);
}

Vec2 apply_homography(const Mat3& h, const Vec2& plane_xy) {
  const Vec3 p = h * Vec3(plane_xy.x(), plane_xy.y(), 1.0);
  return p.head<2>() / p.z();
}

Pose pose_from_homography(const Mat3& h, const CameraIntrinsics& cam) {
  const Mat3 a = cam.matrix().inverse() * h;
  const double norm_sum = a.col(0).norm() + a.col(1).norm();
  if (!(norm_sum > 0.0) || !std::isfinite(norm_sum)) {
    throw FiducialError(FiducialError::Kind::kDegenerate, "homography has degenerate plane axes");
  }
  double lambda = 2.0 / norm_sum;
  if (lambda * a(2, 2) < 0.0) lambda = -lambda;
  const Vec3 translation = lambda * a.col(2);
  if (translation.z() <= 1e-9) {
    throw FiducialError(FiducialError::Kind::kDegenerate, "tag plane passes through the camera center");
  }
  Mat3 r;
  r.col(0) = lambda * a.col(0);
  r.col(1) = lambda * a.col(1);
  r.col(2) = r.col(0).cross(r.col(1));
  return Pose{nearest_rotation(r), translation};
}

TagPoseEstimate estimate_tag_pose(const TagDetection& det, const CameraIntrinsics& cam) {
  TagPoseEstimate est;
  est.tag_in_camera = pose_from_homography(homography_from_corners(det), cam);
  double sq = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec3 x = est.tag_in_camera.apply(tag_corner(i, det.tag_size_m));
    const Vec2 px(cam.fx() * x.x() / x.z() + cam.cx(), cam.fy() * x.y() / x.z() + cam.cy());
    sq += (px - det.corners_px[i]).squaredNorm();
  }
  est.reprojection_rms_px = std::sqrt(sq / 4.0);
  return est;
}

}  // namespace flightline::fiducial
