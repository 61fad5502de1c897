#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "flightline/tracker/track_point.hpp"

namespace flightline::service {

/// One committed point (or one replayed record) as pushed to stream consumers.
struct StreamEvent {
  std::uint64_t seq = 0;  // commit sequence, or position within the replay session
  bool replay = false;
  std::uint64_t replay_id = 0;  // 0 for live events
  tracking::TrackPoint point;
};

/// {"seq":..,"replay":..,"replay_id":..,"point":<log record>}
std::string format_event(const StreamEvent& e);

/// A consumer's bounded queue. A consumer that lets it overflow is disconnected.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  /// Waits up to `timeout` for the next event. nullopt on timeout or once closed and drained.
  std::optional<StreamEvent> pop(std::chrono::milliseconds timeout);

  /// True once closed by overflow or shutdown; queued events are still delivered
  /// after a shutdown close but not after an overflow.
  bool closed() const;
  bool overflowed() const;

 private:
  friend class EventBus;
  bool offer(const StreamEvent& e);
  void close(bool overflow);

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<StreamEvent> queue_;
  bool closed_ = false;
  bool overflowed_ = false;
};

/// Fan-out of stream events to every connected consumer, preserving publish order.
class EventBus {
 public:
  explicit EventBus(std::size_t queue_capacity = 4096) : capacity_(queue_capacity) {}

  std::shared_ptr<Subscription> subscribe();
  void unsubscribe(const std::shared_ptr<Subscription>& s);

  void publish(const StreamEvent& e);

  /// Closes every subscription and refuses new ones.
  void shutdown();

  std::size_t subscribers() const;
  std::uint64_t disconnected_for_overflow() const;

 private:
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  std::uint64_t overflow_drops_ = 0;
  bool shut_down_ = false;
};

}  // namespace flightline::service
