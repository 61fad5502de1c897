#pragma once

namespace flightline::fiducial {

/// Inputs of the maximum-detection-distance estimate.
struct DistanceQuery {
  double tag_size_m = 0.0;          // t: side of the tag in meters
  int bits_per_width = 10;          // b: bit cells spanning the tag width
  double hfov_rad = 0.0;            // f: horizontal field of view
  double pixels_per_bit = 5.0;      // p: pixels needed to resolve one bit
  int resolution_h = 0;             // r: horizontal resolution in pixels
};

/// Farthest range at which a tag still spans enough pixels to decode:
///   t / (2 tan(b f p / (2 r)))
/// Throws FiducialError(kDomain) when the tan argument reaches pi/2 or an input
/// is not positive (t may be zero).
double max_detection_distance(const DistanceQuery& q);

}  // namespace flightline::fiducial
