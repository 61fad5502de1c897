#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include "flightline/service/config.hpp"
#include "flightline/service/pipeline.hpp"

namespace flightline::service {

struct ApiOptions {
  std::chrono::milliseconds heartbeat{15'000};
};

/// HTTP front end over a pipeline.
///
///   GET    /assets                     latest point per asset, one log record per line, by asset id
///   GET    /assets/{id}/track?from&to  logged points of one asset in [from, to] (unix ms, both optional)
///   GET    /stream                     server-sent events, one per commit or replayed record
///   POST   /replay {"from","to","rate"} starts a replay session; rate is a number or "batch"
///   DELETE /replay                     cancels the running replay session
///   GET    /health                     pipeline counters
class ApiServer {
 public:
  ApiServer(Pipeline& pipeline, ApiOptions options = {});
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and starts serving on a background thread. Throws BindError.
  void start(const Endpoint& at);
  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
  std::thread thread_;
};

}  // namespace flightline::service
