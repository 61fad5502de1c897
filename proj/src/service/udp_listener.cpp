#include "flightline/service/udp_listener.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

namespace flightline::service {

UdpListener::UdpListener(const Endpoint& at, Handler handler) : handler_(std::move(handler)) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
  addrinfo* res = nullptr;
  const auto port_text = std::to_string(at.port);
  if (const int rc = ::getaddrinfo(at.host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw BindError("udp " + to_string(at) + ": " + ::gai_strerror(rc));
  }
  std::string last_error = "no address";
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw BindError("udp " + to_string(at) + ": " + last_error);

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                            : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  thread_ = std::jthread([this](std::stop_token stop) { run(stop); });
}

UdpListener::~UdpListener() { stop(); }

void UdpListener::stop() {
  if (thread_.joinable()) {
    thread_.request_stop();
    thread_.join();
  }
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void UdpListener::run(std::stop_token stop) {
  std::array<std::uint8_t, 2048> buf{};
  pollfd pfd{fd_, POLLIN, 0};
  while (!stop.stop_requested()) {
    if (::poll(&pfd, 1, 100) <= 0) continue;
    const auto n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) continue;
    handler_(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
  }
}

}  // namespace flightline::service
