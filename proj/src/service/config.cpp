#include "flightline/service/config.hpp"

#include <charconv>

#include "yaml_fields.hpp"

namespace flightline::service {

using detail::as;
using detail::field;
using detail::field_or;
using detail::need;
using detail::where;

namespace fs = std::filesystem;

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("address '" + text + "' is not host:port");
  Endpoint e;
  e.host = text.substr(0, colon);
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || ptr != last || first == last || port > 65535) {
    throw ConfigError("address '" + text + "' has a bad port");
  }
  e.port = static_cast<std::uint16_t>(port);
  return e;
}

std::string to_string(const Endpoint& e) { return e.host + ":" + std::to_string(e.port); }

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

geo::GeoPoint geo_point(const fs::path& file, const YAML::Node& n) {
  geo::GeoPoint p{field<double>(file, n, "lat"), field<double>(file, n, "lon"), field_or<double>(file, n, "alt", 0.0)};
  try {
    geo::validate(p);
  } catch (const std::exception& e) {
    throw ConfigError(where(file, n) + ": " + e.what());
  }
  return p;
}

}  // namespace

ServiceConfig load_service_config(const fs::path& path) {
  const auto root = detail::load_yaml(path);
  if (!root.IsMap()) throw ConfigError(path.string() + ": expected a mapping at top level");
  const auto dir = path.parent_path();
  ServiceConfig cfg;
  const auto endpoint = [&](const char* key, const Endpoint& fallback) {
    const auto n = root[key];
    if (!n) return fallback;
    try {
      return parse_endpoint(as<std::string>(path, n, key));
    } catch (const ConfigError& e) {
      throw ConfigError(where(path, n) + ": " + e.what());
    }
  };
  cfg.gateway_listen = endpoint("gateway_listen", cfg.gateway_listen);
  cfg.api_listen = endpoint("api_listen", cfg.api_listen);
  cfg.origin = geo_point(path, need(path, root, "origin"));
  try {
    geo::FrameOrigin check(cfg.origin);
  } catch (const std::exception& e) {
    throw ConfigError(where(path, root["origin"]) + ": " + e.what());
  }
  cfg.log = resolve(dir, field<std::string>(path, root, "log"));
  if (const auto n = root["bindings"]) cfg.bindings = resolve(dir, as<std::string>(path, n, "bindings"));
  if (const auto n = root["cameras"]) cfg.cameras = resolve(dir, as<std::string>(path, n, "cameras"));
  if (const auto n = root["scenario"]) cfg.scenario = resolve(dir, as<std::string>(path, n, "scenario"));
  for (const auto* p : {&cfg.bindings, &cfg.cameras, &cfg.scenario}) {
    if (!p->empty() && !fs::is_regular_file(*p)) throw ConfigError(path.string() + ": cannot read " + p->string());
  }
  return cfg;
}

namespace {

fiducial::CameraIntrinsics intrinsics(const fs::path& file, const YAML::Node& cam) {
  const auto res = need(file, cam, "resolution");
  if (!res.IsSequence() || res.size() != 2) throw ConfigError(where(file, res) + ": resolution is [h, v]");
  const int rh = as<int>(file, res[0], "resolution");
  const int rv = as<int>(file, res[1], "resolution");
  try {
    if (cam["hfov_deg"]) {
      return fiducial::CameraIntrinsics::from_fov(rh, rv, field<double>(file, cam, "hfov_deg") * M_PI / 180.0);
    }
    if (cam["focal_px"]) return fiducial::CameraIntrinsics::from_focal(rh, rv, field<double>(file, cam, "focal_px"));
  } catch (const fiducial::FiducialError& e) {
    throw ConfigError(where(file, cam) + ": " + e.what());
  }
  throw ConfigError(where(file, cam) + ": camera needs hfov_deg or focal_px");
}

}  // namespace

std::vector<CameraDef> load_cameras(const fs::path& path) {
  const auto root = detail::load_yaml(path);
  const auto list = need(path, root, "cameras");
  if (!list.IsSequence()) throw ConfigError(where(path, list) + ": 'cameras' must be a list");
  std::vector<CameraDef> out;
  for (const auto& cam : list) {
    CameraDef def{.id = field<std::string>(path, cam, "id"),
                  .intrinsics = intrinsics(path, cam),
                  .pose = {},
                  .calibration_rms_px = std::nullopt};
    for (const auto& other : out) {
      if (other.id == def.id) throw ConfigError(where(path, cam) + ": duplicate camera id '" + def.id + "'");
    }
    def.bits_per_width = field_or<int>(path, cam, "bits_per_width", def.bits_per_width);
    def.pixels_per_bit = field_or<double>(path, cam, "pixels_per_bit", def.pixels_per_bit);
    if (def.bits_per_width <= 0 || !(def.pixels_per_bit > 0.0)) {
      throw ConfigError(where(path, cam) + ": bits_per_width and pixels_per_bit must be positive");
    }
    if (const auto pose = cam["pose"]) {
      const fiducial::Vec3 c(field<double>(path, pose, "east"), field<double>(path, pose, "north"),
                             field<double>(path, pose, "up"));
      def.pose = fiducial::camera_pose_looking(c, field<double>(path, pose, "yaw_deg") * M_PI / 180.0,
                                               field_or<double>(path, pose, "pitch_deg", 0.0) * M_PI / 180.0);
    } else if (const auto pts = cam["calibration_points"]) {
      std::vector<fiducial::CalibrationPoint> survey;
      for (const auto& p : pts) {
        const auto px = need(path, p, "pixel");
        if (!px.IsSequence() || px.size() != 2) throw ConfigError(where(path, px) + ": pixel is [u, v]");
        survey.push_back({geo::EnuPoint{field<double>(path, p, "east"), field<double>(path, p, "north"),
                                        field<double>(path, p, "up")},
                          fiducial::Vec2(as<double>(path, px[0], "pixel"), as<double>(path, px[1], "pixel"))});
      }
      try {
        const auto cal = fiducial::dlt_calibrate(survey);
        def.pose = fiducial::camera_pose_from_projection(cal.projection, def.intrinsics);
        def.calibration_rms_px = cal.reprojection_rms_px;
      } catch (const fiducial::FiducialError& e) {
        throw ConfigError(where(path, pts) + ": calibration failed: " + e.what());
      }
    } else {
      throw ConfigError(where(path, cam) + ": camera needs 'pose' or 'calibration_points'");
    }
    out.push_back(std::move(def));
  }
  return out;
}

}  // namespace flightline::service
