#include "flightline/service/simulation.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <queue>
#include <random>

#include "flightline/fiducial/detection_range.hpp"
#include "flightline/lorawan/gps_payload.hpp"

namespace flightline::service {

std::vector<std::string> SimSummary::violations() const {
  std::vector<std::string> v;
  const auto check = [&](bool ok, const char* what) {
    if (!ok) v.emplace_back(what);
  };
  check(copies_sent == forwarded + dropped(), "copies_sent != forwarded + dropped");
  check(forwarded == new_fixes + duplicates + decode_failures, "forwarded != new_fixes + duplicates + decode_failures");
  check(new_fixes == frames_heard, "new_fixes != frames heard by at least one gateway");
  check(gps_committed == new_fixes - unbound - stale, "gps_committed != new_fixes - unbound - stale");
  check(sightings_generated == sightings_committed + sightings_skipped + sightings_unbound + sightings_stale,
        "sightings_generated != committed + skipped + unbound + stale");
  return v;
}

std::string format_summary(const SimSummary& s) {
  std::string out;
  const auto row = [&](const char* name, std::uint64_t v) { out += std::string(name) + " " + std::to_string(v) + "\n"; };
  row("frames_sent", s.frames_sent);
  row("frames_deferred", s.frames_deferred);
  row("frames_heard", s.frames_heard);
  row("copies_sent", s.copies_sent);
  row("forwarded", s.forwarded);
  row("dropped", s.dropped());
  row("dropped_out_of_range", s.dropped_out_of_range);
  row("dropped_loss", s.dropped_loss);
  row("new_fixes", s.new_fixes);
  row("duplicates", s.duplicates);
  row("decode_failures", s.decode_failures);
  row("gps_committed", s.gps_committed);
  row("unbound", s.unbound);
  row("stale", s.stale);
  row("sightings_generated", s.sightings_generated);
  row("sightings_committed", s.sightings_committed);
  row("sightings_skipped", s.sightings_skipped);
  row("sightings_unbound", s.sightings_unbound);
  row("sightings_stale", s.sightings_stale);
  if (s.cancelled) out += "cancelled\n";
  return out;
}

namespace {

enum class EventKind { kTransmit, kArrive, kFrame };

struct Event {
  std::int64_t t_ms;
  std::uint64_t order;  // insertion order breaks ties
  EventKind kind;
  std::size_t index;
  lora::GatewayDatagram datagram;

  bool operator>(const Event& o) const { return t_ms != o.t_ms ? t_ms > o.t_ms : order > o.order; }
};

// Standard normal from raw 64-bit draws, so results do not depend on the library's distributions.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (spare_) {
      const double s = *spare_;
      spare_.reset();
      return s;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

struct DeviceState {
  const DeviceSpec* spec;
  double first_s;
  std::uint64_t k = 0;  // index of the next scheduled fix
  std::uint16_t fcnt = 0;
  lora::DutyCycleGate gate;
};

struct CameraState {
  const SyntheticCameraSpec* spec;
  const CameraDef* def;
  Gaussian noise;
  std::uint64_t k = 0;
};

fiducial::Pose tag_pose(const AircraftSpec& ac, double t_s) {
  const auto enu = position_at(ac.path, t_s);
  const fiducial::Vec3 c = fiducial::to_vec(enu);
  // Tag z points away from a viewer standing in the facing direction.
  return fiducial::Pose{fiducial::camera_pose_looking(c, (ac.facing_deg + 180.0) * M_PI / 180.0, 0.0).rotation, c};
}

class Simulator {
 public:
  Simulator(const Scenario& sc, const std::vector<CameraDef>& defs, Pipeline& pipeline, const SimOptions& opt)
      : sc_(sc), pipeline_(pipeline), opt_(opt), end_ms_(sc.start_unix_ms + std::llround(sc.duration_s * 1000.0)) {
    for (const auto& g : sc.gateways) gateways_.emplace_back(g);
    const auto n = sc.devices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = sc.devices[i];
      const double first = d.first_fix_s.value_or(d.fix_interval_s * static_cast<double>(i) / static_cast<double>(n));
      devices_.push_back(DeviceState{&d, first, 0, 0, lora::DutyCycleGate{}});
    }
    for (const auto& c : sc.cameras) {
      const CameraDef* def = nullptr;
      for (const auto& d : defs) {
        if (d.id == c.camera_id) def = &d;
      }
      if (def == nullptr) throw ConfigError("scenario camera '" + c.camera_id + "' has no camera definition");
      cameras_.push_back(CameraState{&c, def, Gaussian(c.seed), 0});
    }
  }

  SimSummary run() {
    bind_assets();
    for (std::size_t i = 0; i < devices_.size(); ++i) schedule_fix(i);
    for (std::size_t i = 0; i < cameras_.size(); ++i) schedule_frame(i);
    const auto wall0 = std::chrono::steady_clock::now();
    while (!queue_.empty()) {
      if (opt_.stop.stop_requested() || !pace(wall0, queue_.top().t_ms)) {
        sum_.cancelled = true;
        break;
      }
      const Event e = queue_.top();
      queue_.pop();
      switch (e.kind) {
        case EventKind::kTransmit: transmit(e); break;
        case EventKind::kArrive: arrive(e); break;
        case EventKind::kFrame: frame(e); break;
      }
    }
    return sum_;
  }

 private:
  void bind_assets() {
    auto& tracker = pipeline_.tracker();
    for (const auto& d : sc_.devices) {
      if (d.asset) tracker.bind_device(d.dev_addr, *d.asset);
    }
    for (const auto& a : sc_.aircraft) {
      if (a.asset) tracker.bind_tag(a.tag_id, *a.asset);
    }
  }

  void push(std::int64_t t, EventKind kind, std::size_t index, lora::GatewayDatagram dg = {}) {
    queue_.push(Event{t, next_order_++, kind, index, std::move(dg)});
  }

  std::int64_t at(double offset_s) const { return sc_.start_unix_ms + std::llround(offset_s * 1000.0); }

  void schedule_fix(std::size_t i) {
    auto& d = devices_[i];
    const auto t = at(d.first_s + static_cast<double>(d.k) * d.spec->fix_interval_s);
    if (t <= end_ms_) push(t, EventKind::kTransmit, i);
  }

  void schedule_frame(std::size_t i) {
    auto& c = cameras_[i];
    const auto t = at(static_cast<double>(c.k) * c.spec->frame_interval_s);
    if (t <= end_ms_) push(t, EventKind::kFrame, i);
  }

  // Sleeps until the wall time of simulated instant `t`. False when stopped.
  bool pace(std::chrono::steady_clock::time_point wall0, std::int64_t t) {
    if (!(opt_.speed > 0.0)) return true;
    const auto due = wall0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double, std::milli>(static_cast<double>(t - sc_.start_unix_ms) /
                                                                           opt_.speed));
    std::mutex m;
    std::unique_lock lock(m);
    std::condition_variable_any cv;
    cv.wait_until(lock, opt_.stop, due, [] { return false; });
    return !opt_.stop.stop_requested();
  }

  void transmit(const Event& e) {
    auto& d = devices_[e.index];
    const double t_s = static_cast<double>(e.t_ms - sc_.start_unix_ms) / 1000.0;
    const auto pos = geo::enu_to_geo(position_at(d.spec->path, t_s), pipeline_.tracker().origin());
    const lora::UplinkFrame uplink{d.spec->dev_addr, d.fcnt, lora::kGpsFixPort,
                                   lora::encode_gps_fix(lora::make_gps_fix(pos, d.spec->battery_pct))};
    const auto frame = lora::encode_uplink(uplink);
    const auto decision = d.gate.request(lora::airtime_ms(sc_.radio, static_cast<int>(frame.size())), e.t_ms);
    if (const auto* defer = std::get_if<lora::Defer>(&decision)) {
      ++sum_.frames_deferred;
      if (defer->next_allowed_ms <= end_ms_) push(defer->next_allowed_ms, EventKind::kTransmit, e.index);
      return;
    }
    ++d.fcnt;
    ++sum_.frames_sent;
    bool heard = false;
    for (auto& gw : gateways_) {
      ++sum_.copies_sent;
      auto out = gw.receive(pos, frame, e.t_ms);
      if (auto* fwd = std::get_if<lora::Forwarded>(&out)) {
        ++sum_.forwarded;
        heard = true;
        const auto rx = fwd->datagram.rx_unix_ms;
        push(rx, EventKind::kArrive, e.index, std::move(fwd->datagram));
      } else if (std::get<lora::Dropped>(out).reason == lora::Dropped::Reason::kLoss) {
        ++sum_.dropped_loss;
      } else {
        ++sum_.dropped_out_of_range;
      }
    }
    if (heard) ++sum_.frames_heard;
    // A deferred fix keeps its slot; the next one stays on the original schedule.
    while (at(d.first_s + static_cast<double>(d.k) * d.spec->fix_interval_s) <= e.t_ms) ++d.k;
    schedule_fix(e.index);
  }

  void arrive(const Event& e) {
    const auto bytes = lora::encode_datagram(e.datagram);
    const auto out = pipeline_.handle_datagram(bytes);
    std::visit(
        [&](const auto& r) {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, lora::NewFix>) ++sum_.new_fixes;
          if constexpr (std::is_same_v<R, lora::Duplicate>) ++sum_.duplicates;
          if constexpr (std::is_same_v<R, lora::DecodeFailure>) ++sum_.decode_failures;
        },
        out.server);
    if (!out.tracker) return;
    if (std::holds_alternative<tracking::Committed>(*out.tracker)) ++sum_.gps_committed;
    if (std::holds_alternative<tracking::Unbound>(*out.tracker)) ++sum_.unbound;
    if (std::holds_alternative<tracking::Stale>(*out.tracker)) ++sum_.stale;
  }

  void frame(const Event& e) {
    auto& c = cameras_[e.index];
    const double t_s = static_cast<double>(e.t_ms - sc_.start_unix_ms) / 1000.0;
    const auto& cam = c.def->intrinsics;
    for (const auto& ac : sc_.aircraft) {
      const auto pose = tag_pose(ac, t_s);
      const double range = (pose.translation - c.def->pose.translation).norm();
      const double max_range = fiducial::max_detection_distance({.tag_size_m = ac.tag_size_m,
                                                                  .bits_per_width = c.def->bits_per_width,
                                                                  .hfov_rad = cam.hfov_rad(),
                                                                  .pixels_per_bit = c.def->pixels_per_bit,
                                                                  .resolution_h = cam.resolution_h()});
      if (range > max_range) continue;
      auto det = fiducial::project_tag(cam, c.def->pose, pose, ac.tag_size_m, ac.tag_id);
      if (!det) continue;
      for (auto& px : det->corners_px) {
        const double du = c.spec->noise_px * c.noise();
        const double dv = c.spec->noise_px * c.noise();
        px += fiducial::Vec2(du, dv);
      }
      ++sum_.sightings_generated;
      const auto out = pipeline_.handle_sighting(*det, c.def->id, e.t_ms);
      if (std::holds_alternative<tracking::Committed>(out)) ++sum_.sightings_committed;
      if (std::holds_alternative<tracking::Skipped>(out)) ++sum_.sightings_skipped;
      if (std::holds_alternative<tracking::Unbound>(out)) ++sum_.sightings_unbound;
      if (std::holds_alternative<tracking::Stale>(out)) ++sum_.sightings_stale;
    }
    ++c.k;
    schedule_frame(e.index);
  }

  const Scenario& sc_;
  Pipeline& pipeline_;
  const SimOptions& opt_;
  const std::int64_t end_ms_;
  std::vector<lora::Gateway> gateways_;
  std::vector<DeviceState> devices_;
  std::vector<CameraState> cameras_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_order_ = 0;
  SimSummary sum_;
};

}  // namespace

SimSummary run_simulation(const Scenario& scenario, const std::vector<CameraDef>& cameras, Pipeline& pipeline,
                          const SimOptions& options) {
  return Simulator(scenario, cameras, pipeline, options).run();
}

}  // namespace flightline::service
