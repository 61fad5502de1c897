#include "flightline/geodesy/geodesy.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <tuple>

namespace flightline::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat_deg) || !std::isfinite(p.lon_deg) || !std::isfinite(p.alt_m)) {
    throw ValidationError("geo point has non-finite field");
  }
  if (p.lat_deg < -90.0 || p.lat_deg > 90.0) {
    throw ValidationError("latitude out of range [-90, 90]: " + std::to_string(p.lat_deg));
  }
  if (p.lon_deg < -180.0 || p.lon_deg > 180.0) {
    throw ValidationError("longitude out of range [-180, 180]: " + std::to_string(p.lon_deg));
  }
}

void validate(const EnuPoint& p) {
  if (!std::isfinite(p.east_m) || !std::isfinite(p.north_m) || !std::isfinite(p.up_m)) {
    throw ValidationError("enu point has non-finite field");
  }
}

FrameOrigin::FrameOrigin(GeoPoint origin) : origin_(origin) {
  validate(origin_);
  // cos(lat0) is the east scale; at the poles the frame collapses.
  if (std::abs(origin_.lat_deg) >= 89.9) {
    throw ValidationError("frame origin too close to a pole");
  }
}

EnuPoint geo_to_enu(const GeoPoint& p, const FrameOrigin& origin) {
  validate(p);
  const GeoPoint& o = origin.point();
  const double dlat = (p.lat_deg - o.lat_deg) * kDegToRad;
  double dlon_deg = p.lon_deg - o.lon_deg;
  if (dlon_deg > 180.0) dlon_deg -= 360.0;
  if (dlon_deg < -180.0) dlon_deg += 360.0;
  const double dlon = dlon_deg * kDegToRad;
  return EnuPoint{dlon * std::cos(o.lat_deg * kDegToRad) * kEarthRadiusM, dlat * kEarthRadiusM,
                  p.alt_m - o.alt_m};
}

GeoPoint enu_to_geo(const EnuPoint& p, const FrameOrigin& origin) {
  validate(p);
  const GeoPoint& o = origin.point();
  GeoPoint out;
  out.lat_deg = o.lat_deg + (p.north_m / kEarthRadiusM) * kRadToDeg;
  out.lon_deg =
      o.lon_deg + (p.east_m / (kEarthRadiusM * std::cos(o.lat_deg * kDegToRad))) * kRadToDeg;
  if (out.lon_deg > 180.0) out.lon_deg -= 360.0;
  if (out.lon_deg < -180.0) out.lon_deg += 360.0;
  out.alt_m = o.alt_m + p.up_m;
  validate(out);
  return out;
}

double ground_distance(const GeoPoint& a, const GeoPoint& b) {
  validate(a);
  validate(b);
  // Evaluate in a canonical argument order so the result is bitwise symmetric.
  const bool swap = std::tie(b.lat_deg, b.lon_deg) < std::tie(a.lat_deg, a.lon_deg);
  const GeoPoint& p = swap ? b : a;
  const GeoPoint& q = swap ? a : b;
  const double lat1 = p.lat_deg * kDegToRad;
  const double lat2 = q.lat_deg * kDegToRad;
  const double dlon = (q.lon_deg - p.lon_deg) * kDegToRad;
  // Great-circle central angle in atan2 form: well conditioned from 0 up to antipodes,
  // where the asin form of the haversine loses precision.
  const double x = std::cos(lat2) * std::sin(dlon);
  const double y = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  const double z = std::sin(lat1) * std::sin(lat2) + std::cos(lat1) * std::cos(lat2) * std::cos(dlon);
  return kEarthRadiusM * std::atan2(std::hypot(x, y), z);
}

std::string to_string(const GeoPoint& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.7f, %.7f, %.1f)", p.lat_deg, p.lon_deg, p.alt_m);
  return buf;
}

}  // namespace flightline::geo
