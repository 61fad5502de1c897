#include "flightline/service/event_bus.hpp"

#include <algorithm>

#include "flightline/storage/record.hpp"

namespace flightline::service {

std::string format_event(const StreamEvent& e) {
  std::string s = "{\"seq\":" + std::to_string(e.seq) + ",\"replay\":" + (e.replay ? "true" : "false") +
                  ",\"replay_id\":" + std::to_string(e.replay_id) + ",\"point\":";
  s += storage::format_record(e.point);
  s += '}';
  return s;
}

std::optional<StreamEvent> Subscription::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [this] { return !queue_.empty() || closed_; });
  if (queue_.empty() || overflowed_) return std::nullopt;
  auto e = std::move(queue_.front());
  queue_.pop_front();
  return e;
}

bool Subscription::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

bool Subscription::overflowed() const {
  std::lock_guard lock(mutex_);
  return overflowed_;
}

bool Subscription::offer(const StreamEvent& e) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return false;
    if (queue_.size() >= capacity_) {
      closed_ = overflowed_ = true;
      queue_.clear();
    } else {
      queue_.push_back(e);
    }
  }
  cv_.notify_one();
  return !overflowed();
}

void Subscription::close(bool overflow) {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
    overflowed_ = overflowed_ || overflow;
  }
  cv_.notify_all();
}

std::shared_ptr<Subscription> EventBus::subscribe() {
  auto s = std::make_shared<Subscription>(capacity_);
  std::lock_guard lock(mutex_);
  if (shut_down_) {
    s->close(false);
  } else {
    subs_.push_back(s);
  }
  return s;
}

void EventBus::unsubscribe(const std::shared_ptr<Subscription>& s) {
  std::lock_guard lock(mutex_);
  std::erase(subs_, s);
}

void EventBus::publish(const StreamEvent& e) {
  std::lock_guard lock(mutex_);
  std::erase_if(subs_, [&](const std::shared_ptr<Subscription>& s) {
    if (s->offer(e)) return false;
    if (s->overflowed()) ++overflow_drops_;
    return true;
  });
}

void EventBus::shutdown() {
  std::lock_guard lock(mutex_);
  shut_down_ = true;
  for (auto& s : subs_) s->close(false);
  subs_.clear();
}

std::size_t EventBus::subscribers() const {
  std::lock_guard lock(mutex_);
  return subs_.size();
}

std::uint64_t EventBus::disconnected_for_overflow() const {
  std::lock_guard lock(mutex_);
  return overflow_drops_;
}

}  // namespace flightline::service
