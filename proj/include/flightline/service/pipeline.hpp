#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "flightline/lorawan/network.hpp"
#include "flightline/service/event_bus.hpp"
#include "flightline/storage/trajectory_log.hpp"
#include "flightline/tracker/tracker.hpp"

namespace flightline::service {

struct DatagramOutcome {
  lora::IngestResult server;
  std::optional<tracking::IngestOutcome> tracker;  // set for a NewFix
};

struct Health {
  lora::ServerMetrics server;
  tracking::TrackerMetrics tracker;
  std::uint64_t log_records = 0;
  std::size_t stream_subscribers = 0;
  std::uint64_t stream_overflow_disconnects = 0;
  bool replay_active = false;
};

std::string format_health(const Health& h);

/// datagram -> network server -> tracker -> trajectory log -> event stream.
///
/// Datagrams from any thread are handled one at a time, so the order of fixes
/// leaving the network server is the commit order. A single replay session may
/// run alongside, publishing replay-tagged events on the same stream.
class Pipeline {
 public:
  Pipeline(const geo::FrameOrigin& origin, tracking::BindingTable bindings, const std::filesystem::path& log_path,
           std::size_t stream_queue_capacity = 4096);
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  DatagramOutcome handle_datagram(lora::ByteView bytes);
  DatagramOutcome handle_datagram(const lora::GatewayDatagram& datagram);

  /// Throws tracking::UncalibratedCamera for an unknown camera.
  tracking::IngestOutcome handle_sighting(const fiducial::TagDetection& detection, const std::string& camera_id,
                                          std::int64_t timestamp_ms);

  tracking::Tracker& tracker() noexcept { return tracker_; }
  const tracking::Tracker& tracker() const noexcept { return tracker_; }
  EventBus& bus() noexcept { return bus_; }
  const std::filesystem::path& log_path() const noexcept { return log_.path(); }

  Health health() const;

  /// Starts replaying the log window onto the stream. Returns the session id, or
  /// nullopt when a session is already running. Throws std::invalid_argument for a bad clock.
  std::optional<std::uint64_t> start_replay(const storage::ReplayClock& clock);
  bool cancel_replay();
  bool replay_active() const noexcept { return replay_active_; }
  /// Blocks until the current session, if any, finishes.
  void wait_replay();

  /// Stops the replay, closes stream consumers and flushes the log.
  void shutdown();

 private:
  void on_commit(const tracking::TrackPoint& p, std::uint64_t seq);

  storage::TrajectoryWriter log_;
  tracking::Tracker tracker_;
  lora::NetworkServer server_;
  EventBus bus_;
  std::mutex ingest_mutex_;

  std::mutex replay_mutex_;
  std::jthread replay_thread_;
  std::atomic<bool> replay_active_{false};
  std::uint64_t next_replay_id_ = 1;
};

}  // namespace flightline::service
