#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "flightline/tracker/track_point.hpp"

namespace flightline::storage {

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One TrackPoint per line as a JSON object with keys in this fixed order:
//
//   {"ts":<int ms>,"kind":"<person|support_equipment|aircraft>","id":"<asset id>",
//    "lat":<7 decimals>,"lon":<7 decimals>,"alt":<1 decimal>,
//    "source":"<gps_lora|fiducial>","quality":<shortest round-trip decimal>|null}
//
// No whitespace, no trailing newline from format_record.
std::string format_record(const tracking::TrackPoint& p);

/// Parses one record line (without newline). Throws RecordError on anything malformed.
tracking::TrackPoint parse_record(std::string_view line);

/// The value a point takes after one trip through the log grammar. Idempotent.
tracking::TrackPoint canonical(const tracking::TrackPoint& p);

}  // namespace flightline::storage
