#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <unordered_map>
#include <variant>

#include "flightline/geodesy/geodesy.hpp"
#include "flightline/lorawan/frame.hpp"
#include "flightline/lorawan/gps_payload.hpp"

namespace flightline::lora {

struct GatewayConfig {
  std::uint64_t gateway_id = 0;
  geo::GeoPoint position;
  double range_m = 5000.0;
  double loss_prob = 0.0;
  std::uint64_t rng_seed = 0;
  // Backhaul delay added to the transmit time: base + uniform [0, jitter).
  std::int64_t latency_ms = 5;
  std::int64_t jitter_ms = 20;
};

void validate(const GatewayConfig& cfg);

struct Forwarded {
  GatewayDatagram datagram;
};

struct Dropped {
  enum class Reason { kOutOfRange, kLoss };
  Reason reason;
};

using GatewayOutcome = std::variant<Forwarded, Dropped>;

/// Simulated gateway with range cutoff and Bernoulli loss from its own seeded RNG.
class Gateway {
 public:
  explicit Gateway(GatewayConfig cfg);

  const GatewayConfig& config() const noexcept { return cfg_; }

  GatewayOutcome receive(const geo::GeoPoint& tx_pos, ByteView frame, std::int64_t tx_unix_ms);

 private:
  double uniform01();

  GatewayConfig cfg_;
  std::mt19937_64 rng_;
};

struct NewFix {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  std::uint64_t gateway_id = 0;
  std::int64_t rx_unix_ms = 0;
  GpsFixPayload fix;

  friend bool operator==(const NewFix&, const NewFix&) = default;
};

struct Duplicate {
  enum class Reason { kWindow, kStaleCounter };
  Reason reason;
};

struct DecodeFailure {
  DecodeError::Kind kind;
};

using IngestResult = std::variant<NewFix, Duplicate, DecodeFailure>;

struct ServerMetrics {
  std::uint64_t datagrams = 0;
  std::uint64_t new_fixes = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t stale_counters = 0;  // subset of duplicates
  std::uint64_t decode_failures = 0;
};

/// Network-server ingest: decodes gateway datagrams and collapses the copies of
/// one uplink heard by several gateways into a single NewFix.
///
/// A (dev_addr, fcnt) key seen within the dedup window of its first arrival is a
/// duplicate. Outside the window, a frame counter that is not newer than the last
/// accepted one (16-bit serial arithmetic) is also a duplicate. Thread-safe.
class NetworkServer {
 public:
  static constexpr std::int64_t kDedupWindowMs = 2000;

  IngestResult ingest(ByteView datagram);
  IngestResult ingest(const GatewayDatagram& datagram);

  ServerMetrics metrics() const;

 private:
  IngestResult ingest_locked(const GatewayDatagram& datagram);
  void prune(std::int64_t now_ms);

  mutable std::mutex mutex_;
  ServerMetrics metrics_;
  // key = dev_addr << 16 | fcnt -> rx time of first arrival
  std::unordered_map<std::uint64_t, std::int64_t> recent_;
  std::unordered_map<std::uint32_t, std::uint16_t> last_fcnt_;
  std::int64_t newest_rx_ms_ = 0;
};

}  // namespace flightline::lora
