#include "flightline/service/pipeline.hpp"

#include <nlohmann/json.hpp>

namespace flightline::service {

std::string format_health(const Health& h) {
  nlohmann::ordered_json j;
  j["received"] = h.server.datagrams;
  j["new_fixes"] = h.server.new_fixes;
  j["deduped"] = h.server.duplicates;
  j["stale_counters"] = h.server.stale_counters;
  j["decode_failures"] = h.server.decode_failures;
  j["committed"] = h.tracker.committed;
  j["gps_committed"] = h.tracker.gps_committed;
  j["unbound"] = h.tracker.unbound;
  j["stale"] = h.tracker.stale;
  j["sightings"] = h.tracker.sightings;
  j["sightings_committed"] = h.tracker.sightings_committed;
  j["sightings_skipped"] = h.tracker.skipped;
  j["log_records"] = h.log_records;
  j["stream_subscribers"] = h.stream_subscribers;
  j["stream_overflow_disconnects"] = h.stream_overflow_disconnects;
  j["replay_active"] = h.replay_active;
  return j.dump();
}

Pipeline::Pipeline(const geo::FrameOrigin& origin, tracking::BindingTable bindings,
                   const std::filesystem::path& log_path, std::size_t stream_queue_capacity)
    : log_(log_path), tracker_(origin, std::move(bindings), &log_), bus_(stream_queue_capacity) {
  tracker_.add_observer([this](const tracking::TrackPoint& p, std::uint64_t seq) { on_commit(p, seq); });
}

Pipeline::~Pipeline() { shutdown(); }

void Pipeline::on_commit(const tracking::TrackPoint& p, std::uint64_t seq) {
  bus_.publish(StreamEvent{.seq = seq, .replay = false, .replay_id = 0, .point = p});
}

DatagramOutcome Pipeline::handle_datagram(lora::ByteView bytes) {
  std::lock_guard lock(ingest_mutex_);
  DatagramOutcome out{server_.ingest(bytes), std::nullopt};
  if (const auto* fix = std::get_if<lora::NewFix>(&out.server)) out.tracker = tracker_.ingest_gps(*fix);
  return out;
}

DatagramOutcome Pipeline::handle_datagram(const lora::GatewayDatagram& datagram) {
  std::lock_guard lock(ingest_mutex_);
  DatagramOutcome out{server_.ingest(datagram), std::nullopt};
  if (const auto* fix = std::get_if<lora::NewFix>(&out.server)) out.tracker = tracker_.ingest_gps(*fix);
  return out;
}

tracking::IngestOutcome Pipeline::handle_sighting(const fiducial::TagDetection& detection,
                                                  const std::string& camera_id, std::int64_t timestamp_ms) {
  std::lock_guard lock(ingest_mutex_);
  return tracker_.ingest_sighting(detection, camera_id, timestamp_ms);
}

Health Pipeline::health() const {
  return Health{.server = server_.metrics(),
                .tracker = tracker_.metrics(),
                .log_records = log_.records_written(),
                .stream_subscribers = bus_.subscribers(),
                .stream_overflow_disconnects = bus_.disconnected_for_overflow(),
                .replay_active = replay_active_};
}

std::optional<std::uint64_t> Pipeline::start_replay(const storage::ReplayClock& clock) {
  storage::validate(clock);
  std::lock_guard lock(replay_mutex_);
  if (replay_active_) return std::nullopt;
  if (replay_thread_.joinable()) replay_thread_.join();
  const std::uint64_t id = next_replay_id_++;
  auto records = storage::query(log_.path(), std::nullopt, clock.start_ms, clock.end_ms).records;
  replay_active_ = true;
  replay_thread_ = std::jthread([this, id, clock, records = std::move(records)](std::stop_token stop) {
    std::uint64_t n = 0;
    storage::replay(
        records, clock,
        [&](const tracking::TrackPoint& p) {
          bus_.publish(StreamEvent{.seq = ++n, .replay = true, .replay_id = id, .point = p});
        },
        stop);
    replay_active_ = false;
  });
  return id;
}

bool Pipeline::cancel_replay() {
  std::lock_guard lock(replay_mutex_);
  if (!replay_thread_.joinable()) return false;
  const bool was_active = replay_active_;
  replay_thread_.request_stop();
  replay_thread_.join();
  return was_active;
}

void Pipeline::wait_replay() {
  std::lock_guard lock(replay_mutex_);
  if (replay_thread_.joinable()) replay_thread_.join();
}

void Pipeline::shutdown() {
  cancel_replay();
  bus_.shutdown();
  std::lock_guard lock(ingest_mutex_);
  log_.close();
}

}  // namespace flightline::service
