#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "flightline/service/api_server.hpp"
#include "flightline/service/config.hpp"
#include "flightline/service/pipeline.hpp"
#include "flightline/service/udp_listener.hpp"

namespace flightline::service {

struct ServiceOptions {
  bool listen_gateways = true;
  bool serve_api = true;
  ApiOptions api;
};

/// The assembled service: bindings and cameras from the config, the pipeline
/// writing to the configured log, and the enabled listeners.
class Service {
 public:
  /// Throws ConfigError, tracking::BindingFileError, storage::StorageError or BindError.
  explicit Service(const ServiceConfig& config, const ServiceOptions& options = {});
  ~Service();

  Pipeline& pipeline() noexcept { return *pipeline_; }
  const std::vector<CameraDef>& cameras() const noexcept { return cameras_; }
  std::uint16_t gateway_port() const noexcept { return udp_ ? udp_->port() : 0; }
  std::uint16_t api_port() const noexcept { return api_ ? api_->port() : 0; }

  /// Stops the listeners, then the pipeline, leaving the log flushed and closed.
  void stop();

 private:
  std::vector<CameraDef> cameras_;
  std::unique_ptr<Pipeline> pipeline_;
  std::unique_ptr<UdpListener> udp_;
  std::unique_ptr<ApiServer> api_;
};

}  // namespace flightline::service
