#include "flightline/storage/record.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace flightline::storage {

using tracking::TrackPoint;

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string format_record(const TrackPoint& p) {
  if (!tracking::is_valid_asset_id(p.asset.id)) throw RecordError("invalid asset id '" + p.asset.id + "'");
  geo::validate(p.position);
  if (p.quality && !std::isfinite(*p.quality)) throw RecordError("quality must be finite");
  std::string out;
  out.reserve(160);
  out += "{\"ts\":";
  out += std::to_string(p.timestamp_ms);
  out += ",\"kind\":\"";
  out += tracking::to_string(p.asset.kind);
  out += "\",\"id\":\"";
  out += p.asset.id;
  out += "\",\"lat\":";
  out += fixed(p.position.lat_deg, 7);
  out += ",\"lon\":";
  out += fixed(p.position.lon_deg, 7);
  out += ",\"alt\":";
  out += fixed(p.position.alt_m, 1);
  out += ",\"source\":\"";
  out += tracking::to_string(p.source);
  out += "\",\"quality\":";
  out += p.quality ? shortest(*p.quality) : "null";
  out += '}';
  return out;
}

TrackPoint parse_record(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw RecordError(std::string("record is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.size() != 8) throw RecordError("record must be an object with 8 fields");
  try {
    TrackPoint p;
    const auto& ts = j.at("ts");
    if (!ts.is_number_integer()) throw RecordError("ts must be an integer");
    p.timestamp_ms = ts.get<std::int64_t>();
    auto kind = tracking::parse_asset_kind(j.at("kind").get<std::string>());
    if (!kind) throw RecordError("unknown asset kind");
    p.asset.kind = *kind;
    p.asset.id = j.at("id").get<std::string>();
    if (!tracking::is_valid_asset_id(p.asset.id)) throw RecordError("invalid asset id");
    const auto number = [&](const char* key) {
      const auto& v = j.at(key);
      if (!v.is_number()) throw RecordError(std::string(key) + " must be a number");
      return v.get<double>();
    };
    p.position = geo::GeoPoint{number("lat"), number("lon"), number("alt")};
    geo::validate(p.position);
    auto source = tracking::parse_source(j.at("source").get<std::string>());
    if (!source) throw RecordError("unknown source");
    p.source = *source;
    const auto& q = j.at("quality");
    if (!q.is_null()) p.quality = number("quality");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  } catch (const geo::ValidationError& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
}

TrackPoint canonical(const TrackPoint& p) { return parse_record(format_record(p)); }

}  // namespace flightline::storage
