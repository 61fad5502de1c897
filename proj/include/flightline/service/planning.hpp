#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flightline/service/config.hpp"

namespace flightline::service {

/// Maximum detection distance of one tag size for one camera, or why it has none.
struct PlanRow {
  std::string camera_id;
  double tag_size_m = 0.0;
  int bits_per_width = 0;
  double pixels_per_bit = 0.0;
  double hfov_rad = 0.0;
  int resolution_h = 0;
  std::optional<double> max_distance_m;
  std::string error;  // set when max_distance_m is empty
};

/// One row per camera and tag size, cameras outermost.
std::vector<PlanRow> plan_cameras(std::span<const CameraDef> cameras, std::span<const double> tag_sizes_m);

std::string format_plan_table(std::span<const PlanRow> rows);

/// One JSON object per line, keys in fixed order, numbers in shortest round-trip form.
std::string format_plan_records(std::span<const PlanRow> rows);

}  // namespace flightline::service
