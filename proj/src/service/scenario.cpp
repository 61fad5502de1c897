#include "flightline/service/scenario.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "yaml_fields.hpp"

namespace flightline::service {

using detail::as;
using detail::field;
using detail::field_or;
using detail::need;
using detail::where;

namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& issues) {
  std::string s = "invalid scenario:";
  for (const auto& i : issues) s += "\n  " + i;
  return s;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> issues)
    : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

geo::EnuPoint position_at(const std::vector<Waypoint>& path, double t_s) {
  if (path.empty()) return {};
  if (t_s <= path.front().t_s) return path.front().enu;
  if (t_s >= path.back().t_s) return path.back().enu;
  const auto hi = std::upper_bound(path.begin(), path.end(), t_s,
                                   [](double t, const Waypoint& w) { return t < w.t_s; });
  const auto lo = hi - 1;
  const double u = (t_s - lo->t_s) / (hi->t_s - lo->t_s);
  const auto lerp = [u](double a, double b) { return a + u * (b - a); };
  return {lerp(lo->enu.east_m, hi->enu.east_m), lerp(lo->enu.north_m, hi->enu.north_m),
          lerp(lo->enu.up_m, hi->enu.up_m)};
}

namespace {

class Loader {
 public:
  explicit Loader(fs::path file) : file_(std::move(file)) {}

  // Runs `fn`, turning a ConfigError into a recorded issue so parsing continues.
  void attempt(const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      issues_.push_back(e.what());
    }
  }

  void issue(const YAML::Node& n, const std::string& msg) { issues_.push_back(where(file_, n) + ": " + msg); }

  template <typename T>
  T get(const YAML::Node& n, const std::string& key) { return field<T>(file_, n, key); }
  template <typename T>
  T get_or(const YAML::Node& n, const std::string& key, T fallback) { return field_or<T>(file_, n, key, fallback); }

  YAML::Node list(const YAML::Node& root, const std::string& key) {
    const auto n = root[key];
    if (n && !n.IsSequence()) {
      issue(n, "'" + key + "' must be a list");
      return {};
    }
    return n;
  }

  tracking::AssetId asset(const YAML::Node& n) {
    const auto kind_text = get<std::string>(n, "kind");
    const auto kind = tracking::parse_asset_kind(kind_text);
    if (!kind) throw ConfigError(where(file_, n) + ": unknown asset kind '" + kind_text + "'");
    tracking::AssetId id{*kind, get<std::string>(n, "id")};
    if (!tracking::is_valid_asset_id(id.id)) throw ConfigError(where(file_, n) + ": bad asset id '" + id.id + "'");
    return id;
  }

  std::vector<Waypoint> path(const YAML::Node& owner) {
    const auto n = need(file_, owner, "waypoints");
    if (!n.IsSequence() || n.size() == 0) throw ConfigError(where(file_, n) + ": waypoints must be a non-empty list");
    std::vector<Waypoint> out;
    for (const auto& w : n) {
      Waypoint p{get<double>(w, "t"), {get<double>(w, "east"), get<double>(w, "north"), get_or<double>(w, "up", 0.0)}};
      if (!out.empty() && !(p.t_s > out.back().t_s)) {
        throw ConfigError(where(file_, w) + ": waypoint times must increase");
      }
      out.push_back(p);
    }
    return out;
  }

  const fs::path& file() const { return file_; }
  std::vector<std::string>& issues() { return issues_; }

 private:
  fs::path file_;
  std::vector<std::string> issues_;
};

}  // namespace

Scenario load_scenario(const fs::path& path) {
  const auto root = detail::load_yaml(path);
  if (!root.IsMap()) throw ScenarioError({path.string() + ": expected a mapping at top level"});
  Loader ld(path);
  Scenario sc;

  ld.attempt([&] {
    sc.start_unix_ms = ld.get<std::int64_t>(root, "start_unix_ms");
    sc.duration_s = ld.get<double>(root, "duration_s");
    if (!(sc.duration_s > 0.0)) ld.issue(root["duration_s"], "duration_s must be positive");
  });

  if (const auto r = root["radio"]) {
    ld.attempt([&] {
      sc.radio.spreading_factor = ld.get_or<int>(r, "spreading_factor", sc.radio.spreading_factor);
      sc.radio.bandwidth_hz = ld.get_or<int>(r, "bandwidth_hz", sc.radio.bandwidth_hz);
      sc.radio.coding_rate_index = ld.get_or<int>(r, "coding_rate_index", sc.radio.coding_rate_index);
      sc.radio.preamble_symbols = ld.get_or<int>(r, "preamble_symbols", sc.radio.preamble_symbols);
      try {
        lora::validate(sc.radio);
      } catch (const lora::RadioParamError& e) {
        ld.issue(r, e.what());
      }
    });
  }

  std::set<std::uint64_t> gateway_ids;
  for (const auto& g : ld.list(root, "gateways")) {
    ld.attempt([&] {
      lora::GatewayConfig cfg;
      cfg.gateway_id = ld.get<std::uint64_t>(g, "id");
      const auto pos = need(ld.file(), g, "position");
      cfg.position = {ld.get<double>(pos, "lat"), ld.get<double>(pos, "lon"), ld.get_or<double>(pos, "alt", 0.0)};
      cfg.range_m = ld.get_or<double>(g, "range_m", cfg.range_m);
      cfg.loss_prob = ld.get_or<double>(g, "loss_prob", cfg.loss_prob);
      cfg.rng_seed = ld.get_or<std::uint64_t>(g, "seed", cfg.gateway_id);
      cfg.latency_ms = ld.get_or<std::int64_t>(g, "latency_ms", cfg.latency_ms);
      cfg.jitter_ms = ld.get_or<std::int64_t>(g, "jitter_ms", cfg.jitter_ms);
      try {
        lora::validate(cfg);
      } catch (const std::exception& e) {
        throw ConfigError(where(ld.file(), g) + ": " + e.what());
      }
      if (!gateway_ids.insert(cfg.gateway_id).second) throw ConfigError(where(ld.file(), g) + ": duplicate gateway id");
      sc.gateways.push_back(cfg);
    });
  }

  std::set<std::uint32_t> addrs;
  std::set<std::string> asset_ids;
  const auto claim_asset = [&](const YAML::Node& n, const tracking::AssetId& a) {
    if (!asset_ids.insert(a.id).second) throw ConfigError(where(ld.file(), n) + ": asset '" + a.id + "' used twice");
  };
  for (const auto& d : ld.list(root, "devices")) {
    ld.attempt([&] {
      DeviceSpec dev;
      dev.dev_addr = ld.get<std::uint32_t>(d, "dev_addr");
      if (!addrs.insert(dev.dev_addr).second) throw ConfigError(where(ld.file(), d) + ": duplicate dev_addr");
      if (const auto a = d["asset"]) {
        dev.asset = ld.asset(a);
        claim_asset(a, *dev.asset);
      }
      dev.fix_interval_s = ld.get_or<double>(d, "fix_interval_s", dev.fix_interval_s);
      if (!(dev.fix_interval_s > 0.0)) throw ConfigError(where(ld.file(), d) + ": fix_interval_s must be positive");
      if (const auto f = d["first_fix_s"]) dev.first_fix_s = as<double>(ld.file(), f, "first_fix_s");
      dev.battery_pct = ld.get_or<int>(d, "battery_pct", dev.battery_pct);
      if (dev.battery_pct < 0 || dev.battery_pct > 100) throw ConfigError(where(ld.file(), d) + ": battery_pct in 0..100");
      dev.path = ld.path(d);
      sc.devices.push_back(std::move(dev));
    });
  }

  std::set<int> tags;
  for (const auto& a : ld.list(root, "aircraft")) {
    ld.attempt([&] {
      AircraftSpec ac;
      ac.tag_id = ld.get<int>(a, "tag_id");
      if (!tags.insert(ac.tag_id).second) throw ConfigError(where(ld.file(), a) + ": duplicate tag_id");
      ac.tag_size_m = ld.get<double>(a, "tag_size_m");
      if (!(ac.tag_size_m > 0.0)) throw ConfigError(where(ld.file(), a) + ": tag_size_m must be positive");
      ac.facing_deg = ld.get_or<double>(a, "facing_deg", ac.facing_deg);
      if (const auto as_node = a["asset"]) {
        ac.asset = ld.asset(as_node);
        claim_asset(as_node, *ac.asset);
      }
      ac.path = ld.path(a);
      sc.aircraft.push_back(std::move(ac));
    });
  }

  for (const auto& c : ld.list(root, "cameras")) {
    ld.attempt([&] {
      SyntheticCameraSpec cam;
      cam.camera_id = ld.get<std::string>(c, "id");
      cam.frame_interval_s = ld.get_or<double>(c, "frame_interval_s", cam.frame_interval_s);
      cam.noise_px = ld.get_or<double>(c, "noise_px", cam.noise_px);
      cam.seed = ld.get_or<std::uint64_t>(c, "seed", cam.seed);
      if (!(cam.frame_interval_s > 0.0) || !(cam.noise_px >= 0.0)) {
        throw ConfigError(where(ld.file(), c) + ": frame_interval_s must be positive and noise_px non-negative");
      }
      sc.cameras.push_back(cam);
    });
  }

  if (!ld.issues().empty()) throw ScenarioError(std::move(ld.issues()));
  return sc;
}

}  // namespace flightline::service
