#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "flightline/geodesy/geodesy.hpp"

namespace flightline::tracking {

enum class AssetKind { kPerson, kSupportEquipment, kAircraft };
enum class Source { kGpsLora, kFiducial };

std::string_view to_string(AssetKind kind) noexcept;
std::string_view to_string(Source source) noexcept;
std::optional<AssetKind> parse_asset_kind(std::string_view s) noexcept;
std::optional<Source> parse_source(std::string_view s) noexcept;

/// Asset ids are non-empty and limited to [A-Za-z0-9_.-] so they can appear in
/// URL paths and whitespace-separated config lines unescaped.
bool is_valid_asset_id(std::string_view id) noexcept;

struct AssetId {
  AssetKind kind = AssetKind::kPerson;
  std::string id;

  friend bool operator==(const AssetId&, const AssetId&) = default;
  /// Ordered by id, then kind.
  friend std::strong_ordering operator<=>(const AssetId& a, const AssetId& b) {
    if (auto c = a.id <=> b.id; c != 0) return c;
    return a.kind <=> b.kind;
  }
};

struct TrackPoint {
  AssetId asset;
  geo::GeoPoint position;
  Source source = Source::kGpsLora;
  std::int64_t timestamp_ms = 0;
  // Battery percent for GPS fixes, corner reprojection RMS (px) for fiducial sightings.
  std::optional<double> quality;

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

}  // namespace flightline::tracking
