#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flightline/fiducial/dlt.hpp"
#include "flightline/fiducial/geometry.hpp"
#include "flightline/geodesy/geodesy.hpp"

namespace flightline::service {

/// Raised for unreadable or invalid configuration; the message names the file and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;  // 0 picks an ephemeral port
};

/// Parses "host:port". Throws ConfigError.
Endpoint parse_endpoint(const std::string& text);
std::string to_string(const Endpoint& e);

struct ServiceConfig {
  Endpoint gateway_listen{"127.0.0.1", 1700};
  Endpoint api_listen{"127.0.0.1", 8080};
  geo::GeoPoint origin;
  std::filesystem::path bindings;  // empty: no bindings file
  std::filesystem::path cameras;   // empty: no cameras
  std::filesystem::path log;
  std::filesystem::path scenario;  // used by simulate when --scenario is absent
};

/// Relative paths in the file resolve against the file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path);

/// A camera the tracker can resolve sightings with.
struct CameraDef {
  std::string id;
  fiducial::CameraIntrinsics intrinsics;
  fiducial::Pose pose;                  // ENU, camera to world
  std::optional<double> calibration_rms_px;  // set when the pose came from surveyed points
  int bits_per_width = 10;
  double pixels_per_bit = 5.0;
};

/// Each camera gives either `pose` or at least six `calibration_points`
/// (surveyed ENU position and observed pixel); the latter runs the DLT.
std::vector<CameraDef> load_cameras(const std::filesystem::path& path);

}  // namespace flightline::service
