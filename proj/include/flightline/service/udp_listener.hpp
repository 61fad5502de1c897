#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>

#include "flightline/service/config.hpp"

namespace flightline::service {

class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receives gateway datagrams on a UDP socket and hands each one to `handler`
/// on the listener thread.
class UdpListener {
 public:
  using Handler = std::function<void(std::span<const std::uint8_t>)>;

  /// Binds immediately; throws BindError.
  UdpListener(const Endpoint& at, Handler handler);
  ~UdpListener();

  UdpListener(const UdpListener&) = delete;
  UdpListener& operator=(const UdpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  void stop();

 private:
  void run(std::stop_token stop);

  int fd_ = -1;
  std::uint16_t port_ = 0;
  Handler handler_;
  std::jthread thread_;
};

}  // namespace flightline::service
