#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flightline/geodesy/geodesy.hpp"
#include "flightline/lorawan/network.hpp"
#include "flightline/lorawan/radio.hpp"
#include "flightline/tracker/track_point.hpp"

namespace flightline::service {

/// Every problem found in a scenario file, one "file:line: message" per entry.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Position in the service's ENU frame at a scenario time.
struct Waypoint {
  double t_s = 0.0;
  geo::EnuPoint enu;
};

/// Piecewise-linear path; holds the first and last positions outside its time span.
geo::EnuPoint position_at(const std::vector<Waypoint>& path, double t_s);

struct DeviceSpec {
  std::uint32_t dev_addr = 0;
  std::optional<tracking::AssetId> asset;  // bound at start when present
  double fix_interval_s = 10.0;
  std::optional<double> first_fix_s;       // default staggers devices across one interval
  int battery_pct = 100;
  std::vector<Waypoint> path;
};

struct AircraftSpec {
  int tag_id = 0;
  double tag_size_m = 1.0;
  double facing_deg = 180.0;  // compass bearing the tag face points toward
  std::optional<tracking::AssetId> asset;
  std::vector<Waypoint> path;
};

/// Renders tag detections from a camera in the service's camera definitions.
struct SyntheticCameraSpec {
  std::string camera_id;
  double frame_interval_s = 1.0;
  double noise_px = 0.0;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::int64_t start_unix_ms = 0;
  double duration_s = 600.0;
  lora::RadioParams radio;
  std::vector<lora::GatewayConfig> gateways;
  std::vector<DeviceSpec> devices;
  std::vector<AircraftSpec> aircraft;
  std::vector<SyntheticCameraSpec> cameras;
};

/// Throws ScenarioError listing every invalid entry, or ConfigError when the file is unreadable.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace flightline::service
