#include "flightline/tracker/track_point.hpp"

#include <algorithm>

namespace flightline::tracking {

std::string_view to_string(AssetKind kind) noexcept {
  switch (kind) {
    case AssetKind::kPerson:
      return "person";
    case AssetKind::kSupportEquipment:
      return "support_equipment";
    case AssetKind::kAircraft:
      return "aircraft";
  }
  return "unknown";
}

std::string_view to_string(Source source) noexcept {
  return source == Source::kGpsLora ? "gps_lora" : "fiducial";
}

std::optional<AssetKind> parse_asset_kind(std::string_view s) noexcept {
  if (s == "person") return AssetKind::kPerson;
  if (s == "support_equipment") return AssetKind::kSupportEquipment;
  if (s == "aircraft") return AssetKind::kAircraft;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) noexcept {
  if (s == "gps_lora") return Source::kGpsLora;
  if (s == "fiducial") return Source::kFiducial;
  return std::nullopt;
}

bool is_valid_asset_id(std::string_view id) noexcept {
  return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '.' || c == '-';
  });
}

}  // namespace flightline::tracking
