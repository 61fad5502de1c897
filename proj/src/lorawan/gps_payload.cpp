#include "flightline/lorawan/gps_payload.hpp"

#include <cmath>
#include <limits>

#include "byte_io.hpp"

namespace flightline::lora {
namespace {

constexpr std::int32_t kMaxLatE7 = 900'000'000;
constexpr std::int32_t kMaxLonE7 = 1'800'000'000;

void check_range(const GpsFixPayload& fix) {
  if (fix.lat_e7 < -kMaxLatE7 || fix.lat_e7 > kMaxLatE7) throw EncodeError("lat_e7 out of range");
  if (fix.lon_e7 < -kMaxLonE7 || fix.lon_e7 > kMaxLonE7) throw EncodeError("lon_e7 out of range");
  if (fix.battery_pct > 100) throw EncodeError("battery_pct above 100");
}

}  // namespace

GpsFixPayload make_gps_fix(const geo::GeoPoint& p, int battery_pct) {
  try {
    geo::validate(p);
  } catch (const geo::ValidationError& e) {
    throw EncodeError(e.what());
  }
  const double alt_dm = std::round(p.alt_m * 10.0);
  if (alt_dm < std::numeric_limits<std::int16_t>::min() ||
      alt_dm > std::numeric_limits<std::int16_t>::max()) {
    throw EncodeError("altitude does not fit in 16-bit decimeters");
  }
  if (battery_pct < 0 || battery_pct > 100) throw EncodeError("battery_pct out of range");
  GpsFixPayload fix;
  fix.lat_e7 = static_cast<std::int32_t>(std::lround(p.lat_deg * 1e7));
  fix.lon_e7 = static_cast<std::int32_t>(std::lround(p.lon_deg * 1e7));
  fix.alt_dm = static_cast<std::int16_t>(alt_dm);
  fix.battery_pct = static_cast<std::uint8_t>(battery_pct);
  return fix;
}

geo::GeoPoint to_geo_point(const GpsFixPayload& fix) noexcept {
  return geo::GeoPoint{fix.lat_e7 / 1e7, fix.lon_e7 / 1e7, fix.alt_dm / 10.0};
}

Bytes encode_gps_fix(const GpsFixPayload& fix) {
  check_range(fix);
  Bytes out;
  out.reserve(kGpsFixSize);
  detail::put_be(out, static_cast<std::uint32_t>(fix.lat_e7));
  detail::put_be(out, static_cast<std::uint32_t>(fix.lon_e7));
  detail::put_be(out, static_cast<std::uint16_t>(fix.alt_dm));
  out.push_back(fix.battery_pct);
  return out;
}

GpsFixPayload decode_gps_fix(ByteView data) {
  if (data.size() != kGpsFixSize) {
    throw DecodeError(DecodeError::Kind::kBadLength,
                      "gps fix payload must be 11 bytes, got " + std::to_string(data.size()));
  }
  GpsFixPayload fix;
  fix.lat_e7 = static_cast<std::int32_t>(detail::get_be<std::uint32_t>(data));
  fix.lon_e7 = static_cast<std::int32_t>(detail::get_be<std::uint32_t>(data.subspan(4)));
  fix.alt_dm = static_cast<std::int16_t>(detail::get_be<std::uint16_t>(data.subspan(8)));
  fix.battery_pct = data[10];
  // Decoded values must satisfy the same invariants the encoder enforces.
  try {
    check_range(fix);
  } catch (const EncodeError& e) {
    throw DecodeError(DecodeError::Kind::kBadValue, e.what());
  }
  return fix;
}

}  // namespace flightline::lora
