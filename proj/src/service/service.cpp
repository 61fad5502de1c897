#include "flightline/service/service.hpp"

namespace flightline::service {

Service::Service(const ServiceConfig& config, const ServiceOptions& options) {
  auto bindings = config.bindings.empty() ? tracking::BindingTable{} : tracking::BindingTable::load(config.bindings);
  if (!config.cameras.empty()) cameras_ = load_cameras(config.cameras);
  pipeline_ = std::make_unique<Pipeline>(geo::FrameOrigin(config.origin), std::move(bindings), config.log);
  for (const auto& cam : cameras_) pipeline_->tracker().add_camera(cam.id, cam.intrinsics, cam.pose);
  if (options.serve_api) {
    api_ = std::make_unique<ApiServer>(*pipeline_, options.api);
    api_->start(config.api_listen);
  }
  if (options.listen_gateways) {
    udp_ = std::make_unique<UdpListener>(config.gateway_listen, [this](std::span<const std::uint8_t> bytes) {
      pipeline_->handle_datagram(bytes);
    });
  }
}

Service::~Service() { stop(); }

void Service::stop() {
  if (udp_) udp_->stop();
  if (api_) api_->stop();
  if (pipeline_) pipeline_->shutdown();
}

}  // namespace flightline::service
