#include "flightline/service/planning.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "flightline/fiducial/detection_range.hpp"

namespace flightline::service {

std::vector<PlanRow> plan_cameras(std::span<const CameraDef> cameras, std::span<const double> tag_sizes_m) {
  std::vector<PlanRow> rows;
  for (const auto& cam : cameras) {
    for (const double t : tag_sizes_m) {
      PlanRow row{.camera_id = cam.id,
                  .tag_size_m = t,
                  .bits_per_width = cam.bits_per_width,
                  .pixels_per_bit = cam.pixels_per_bit,
                  .hfov_rad = cam.intrinsics.hfov_rad(),
                  .resolution_h = cam.intrinsics.resolution_h(),
                  .max_distance_m = std::nullopt,
                  .error = {}};
      try {
        row.max_distance_m = fiducial::max_detection_distance({.tag_size_m = t,
                                                               .bits_per_width = row.bits_per_width,
                                                               .hfov_rad = row.hfov_rad,
                                                               .pixels_per_bit = row.pixels_per_bit,
                                                               .resolution_h = row.resolution_h});
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_plan_table(std::span<const PlanRow> rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %8s %4s %6s %9s %6s %14s\n", "camera", "tag_m", "b", "p", "hfov_rad", "r",
                "max_dist_m");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %8.3f %4d %6.2f %9.4f %6d ", r.camera_id.c_str(), r.tag_size_m,
                  r.bits_per_width, r.pixels_per_bit, r.hfov_rad, r.resolution_h);
    out += line;
    if (r.max_distance_m) {
      std::snprintf(line, sizeof line, "%14.3f\n", *r.max_distance_m);
      out += line;
    } else {
      out += "error: " + r.error + "\n";
    }
  }
  return out;
}

std::string format_plan_records(std::span<const PlanRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["camera"] = r.camera_id;
    j["tag_size_m"] = r.tag_size_m;
    j["b"] = r.bits_per_width;
    j["p"] = r.pixels_per_bit;
    j["hfov_rad"] = r.hfov_rad;
    j["r"] = r.resolution_h;
    j["max_distance_m"] = r.max_distance_m ? nlohmann::ordered_json(*r.max_distance_m) : nlohmann::ordered_json();
    j["error"] = r.max_distance_m ? nlohmann::ordered_json() : nlohmann::ordered_json(r.error);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace flightline::service
