#include "flightline/fiducial/detection_range.hpp"

#include <cmath>
#include <numbers>

#include "flightline/fiducial/geometry.hpp"

namespace flightline::fiducial {

double max_detection_distance(const DistanceQuery& q) {
  using Kind = FiducialError::Kind;
  if (!(q.tag_size_m >= 0.0) || !std::isfinite(q.tag_size_m)) {
    throw FiducialError(Kind::kDomain, "tag size must be non-negative");
  }
  if (q.bits_per_width <= 0 || !(q.hfov_rad > 0.0) || !(q.pixels_per_bit > 0.0) || q.resolution_h <= 0) {
    throw FiducialError(Kind::kDomain, "bits, fov, pixels per bit and resolution must be positive");
  }
  const double arg = q.bits_per_width * q.hfov_rad * q.pixels_per_bit / (2.0 * q.resolution_h);
  if (!(arg < std::numbers::pi / 2.0)) {
    throw FiducialError(Kind::kDomain, "tan argument b*f*p/(2r) must be below pi/2");
  }
  return q.tag_size_m / (2.0 * std::tan(arg));
}

}  // namespace flightline::fiducial
