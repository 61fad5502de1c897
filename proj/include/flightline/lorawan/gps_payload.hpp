#pragma once

#include <cstdint>

#include "flightline/geodesy/geodesy.hpp"
#include "flightline/lorawan/frame.hpp"

namespace flightline::lora {

inline constexpr std::size_t kGpsFixSize = 11;
inline constexpr std::uint8_t kGpsFixPort = 1;

/// Fixed-point GPS report as transmitted by a tracker.
struct GpsFixPayload {
  std::int32_t lat_e7 = 0;
  std::int32_t lon_e7 = 0;
  std::int16_t alt_dm = 0;
  std::uint8_t battery_pct = 0;

  friend bool operator==(const GpsFixPayload&, const GpsFixPayload&) = default;
};

/// Rounds to the wire resolution. Throws EncodeError if the point does not fit.
GpsFixPayload make_gps_fix(const geo::GeoPoint& p, int battery_pct);
geo::GeoPoint to_geo_point(const GpsFixPayload& fix) noexcept;

/// Big-endian lat_e7(4) lon_e7(4) alt_dm(2) battery(1). Throws EncodeError on out-of-range fields.
Bytes encode_gps_fix(const GpsFixPayload& fix);
/// Throws DecodeError (kBadLength) unless exactly 11 bytes.
GpsFixPayload decode_gps_fix(ByteView data);

}  // namespace flightline::lora
