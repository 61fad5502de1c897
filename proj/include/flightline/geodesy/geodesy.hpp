#pragma once

#include <stdexcept>
#include <string>

namespace flightline::geo {

/// Mean earth radius used by every conversion in this namespace.
inline constexpr double kEarthRadiusM = 6'371'000.0;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// WGS84 position. Altitude is meters above the ellipsoid.
struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Local East-North-Up position in meters relative to a FrameOrigin.
struct EnuPoint {
  double east_m = 0.0;
  double north_m = 0.0;
  double up_m = 0.0;

  friend bool operator==(const EnuPoint&, const EnuPoint&) = default;
};

/// Throws ValidationError when lat/lon are out of range or any field is not finite.
void validate(const GeoPoint& p);
void validate(const EnuPoint& p);

/// Anchor of the local tangent plane. Validated on construction and immutable afterwards.
class FrameOrigin {
 public:
  explicit FrameOrigin(GeoPoint origin);

  const GeoPoint& point() const noexcept { return origin_; }

 private:
  GeoPoint origin_;
};

// Spherical small-area approximation:
//   east = dlon * cos(lat0) * R, north = dlat * R, up = alt - alt0.
EnuPoint geo_to_enu(const GeoPoint& p, const FrameOrigin& origin);
GeoPoint enu_to_geo(const EnuPoint& p, const FrameOrigin& origin);

/// Great-circle distance between a and b on the sphere, ignoring altitude.
double ground_distance(const GeoPoint& a, const GeoPoint& b);

std::string to_string(const GeoPoint& p);

}  // namespace flightline::geo
