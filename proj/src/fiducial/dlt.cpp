#include "flightline/fiducial/dlt.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace flightline::fiducial {
namespace {

using MatX = Eigen::MatrixXd;
using Mat4 = Eigen::Matrix4d;

// Centroid to origin, mean distance to the centroid sqrt(2).
template <int N>
Eigen::Matrix<double, N + 1, N + 1> conditioning(const std::vector<Eigen::Matrix<double, N, 1>>& pts) {
  Eigen::Matrix<double, N, 1> centroid = Eigen::Matrix<double, N, 1>::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean = 0.0;
  for (const auto& p : pts) mean += (p - centroid).norm();
  mean /= static_cast<double>(pts.size());
  if (!(mean > 0.0)) {
    throw FiducialError(FiducialError::Kind::kRankDeficient, "calibration points coincide");
  }
  const double s = std::sqrt(2.0) / mean;
  Eigen::Matrix<double, N + 1, N + 1> t = Eigen::Matrix<double, N + 1, N + 1>::Identity();
  t.template topLeftCorner<N, N>() *= s;
  t.template topRightCorner<N, 1>() = -s * centroid;
  return t;
}

}  // namespace

ProjectionMatrix::ProjectionMatrix(const Mat34& m) : m_(m) {
  const double n = m_.block<1, 3>(2, 0).norm();
  if (!(n > 0.0) || !m_.allFinite()) {
    throw FiducialError(FiducialError::Kind::kSingular, "projection matrix has a zero depth row");
  }
  m_ /= n;
  if (m_.leftCols<3>().determinant() < 0.0) m_ = -m_;
}

ProjectionMatrix ProjectionMatrix::from_camera(const CameraIntrinsics& cam, const Pose& camera_pose) {
  const Mat3 world_to_cam = camera_pose.rotation.transpose();
  Mat34 rt;
  rt.leftCols<3>() = world_to_cam;
  rt.col(3) = -world_to_cam * camera_pose.translation;
  return ProjectionMatrix(cam.matrix() * rt);
}

std::optional<Vec2> project_homogeneous(const Mat34& p, const Vec3& world) {
  const Vec3 x = p * world.homogeneous();
  // Depth sign is relative to the sign of the matrix itself.
  const double orientation = p.leftCols<3>().determinant();
  if (x.z() * (orientation < 0.0 ? -1.0 : 1.0) <= 0.0) return std::nullopt;
  return Vec2(x.x() / x.z(), x.y() / x.z());
}

std::optional<Vec2> ProjectionMatrix::project(const Vec3& world) const {
  return project_homogeneous(m_, world);
}

CalibrationResult dlt_calibrate(std::span<const CalibrationPoint> points) {
  const std::size_t n = points.size();
  if (n < 6) {
    throw FiducialError(FiducialError::Kind::kArity,
                        "DLT needs at least 6 points, got " + std::to_string(n));
  }
  std::vector<Vec3> world;
  std::vector<Vec2> pixel;
  world.reserve(n);
  pixel.reserve(n);
  for (const auto& p : points) {
    world.push_back(to_vec(p.world));
    pixel.push_back(p.pixel);
    if (!world.back().allFinite() || !pixel.back().allFinite()) {
      throw FiducialError(FiducialError::Kind::kInvalid, "non-finite calibration point");
    }
  }

  const Mat4 world_t = conditioning<3>(world);
  const Mat3 pixel_t = conditioning<2>(pixel);

  // Coplanar world points leave P undetermined (rank of the system drops to 9).
  {
    Mat3 scatter = Mat3::Zero();
    for (const auto& w : world) {
      const Vec3 c = (world_t * w.homogeneous()).head<3>();
      scatter += c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    if (eig.eigenvalues()(0) <= 1e-10 * eig.eigenvalues()(2)) {
      throw FiducialError(FiducialError::Kind::kRankDeficient, "calibration points are coplanar");
    }
  }

  MatX a = MatX::Zero(static_cast<Eigen::Index>(2 * n), 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d x = world_t * world[i].homogeneous();
    const Vec3 u = pixel_t * pixel[i].homogeneous();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.block<1, 4>(r, 0) = x.transpose();
    a.block<1, 4>(r, 8) = -u.x() * x.transpose();
    a.block<1, 4>(r + 1, 4) = x.transpose();
    a.block<1, 4>(r + 1, 8) = -u.y() * x.transpose();
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 12 || sv(10) <= 1e-10 * sv(0)) {
    throw FiducialError(FiducialError::Kind::kRankDeficient,
                        "calibration points do not determine a unique projection");
  }
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Mat34 pn;
  pn << p.segment<4>(0).transpose(), p.segment<4>(4).transpose(), p.segment<4>(8).transpose();
  const Mat34 raw = pixel_t.inverse() * pn * world_t;

  CalibrationResult result{ProjectionMatrix(raw), 0.0};
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 x = result.projection.matrix() * world[i].homogeneous();
    sq += (x.head<2>() / x.z() - pixel[i]).squaredNorm();
  }
  result.reprojection_rms_px = std::sqrt(sq / static_cast<double>(n));
  return result;
}

geo::EnuPoint camera_center(const ProjectionMatrix& p) {
  const Mat3 m = p.matrix().leftCols<3>();
  Eigen::FullPivLU<Mat3> lu(m);
  if (!lu.isInvertible() || std::abs(m.determinant()) < 1e-300) {
    throw FiducialError(FiducialError::Kind::kSingular, "projection matrix has a singular left block");
  }
  return to_enu(-lu.solve(p.matrix().col(3)));
}

Pose camera_pose_from_projection(const ProjectionMatrix& p, const CameraIntrinsics& cam) {
  const Mat3 b = cam.matrix().inverse() * p.matrix().leftCols<3>();
  const double det = b.determinant();
  if (!(std::abs(det) > 0.0)) {
    throw FiducialError(FiducialError::Kind::kSingular, "projection matrix has a singular left block");
  }
  const Mat3 world_to_cam = nearest_rotation(b / std::cbrt(det));
  return Pose{world_to_cam.transpose(), to_vec(camera_center(p))};
}

}  // namespace flightline::fiducial
