#include "flightline/lorawan/network.hpp"

#include <cmath>
#include <string>

namespace flightline::lora {

void validate(const GatewayConfig& cfg) {
  geo::validate(cfg.position);
  if (!(cfg.range_m > 0.0)) throw geo::ValidationError("gateway range_m must be positive");
  if (!(cfg.loss_prob >= 0.0 && cfg.loss_prob <= 1.0)) {
    throw geo::ValidationError("gateway loss_prob must be within [0, 1]");
  }
  if (cfg.latency_ms < 0 || cfg.jitter_ms < 0) {
    throw geo::ValidationError("gateway latency and jitter must be non-negative");
  }
}

Gateway::Gateway(GatewayConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed) { validate(cfg_); }

double Gateway::uniform01() {
  // 53 high bits -> [0, 1); independent of the standard library's distributions.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

GatewayOutcome Gateway::receive(const geo::GeoPoint& tx_pos, ByteView frame,
                                std::int64_t tx_unix_ms) {
  if (geo::ground_distance(tx_pos, cfg_.position) > cfg_.range_m) {
    return Dropped{Dropped::Reason::kOutOfRange};
  }
  if (uniform01() < cfg_.loss_prob) return Dropped{Dropped::Reason::kLoss};
  std::int64_t delay = cfg_.latency_ms;
  if (cfg_.jitter_ms > 0) delay += static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(cfg_.jitter_ms));
  return Forwarded{GatewayDatagram{cfg_.gateway_id, tx_unix_ms + delay, Bytes(frame.begin(), frame.end())}};
}

IngestResult NetworkServer::ingest(ByteView datagram) {
  std::lock_guard lock(mutex_);
  ++metrics_.datagrams;
  GatewayDatagram dgram;
  try {
    dgram = decode_datagram(datagram);
  } catch (const DecodeError& e) {
    ++metrics_.decode_failures;
    return DecodeFailure{e.kind()};
  }
  return ingest_locked(dgram);
}

IngestResult NetworkServer::ingest(const GatewayDatagram& datagram) {
  std::lock_guard lock(mutex_);
  ++metrics_.datagrams;
  return ingest_locked(datagram);
}

IngestResult NetworkServer::ingest_locked(const GatewayDatagram& dgram) {
  UplinkFrame frame;
  GpsFixPayload fix;
  try {
    frame = decode_uplink(dgram.frame);
    if (frame.port != kGpsFixPort) {
      throw DecodeError(DecodeError::Kind::kBadValue, "unsupported port " + std::to_string(frame.port));
    }
    fix = decode_gps_fix(frame.payload);
  } catch (const DecodeError& e) {
    ++metrics_.decode_failures;
    return DecodeFailure{e.kind()};
  }

  if (dgram.rx_unix_ms > newest_rx_ms_) {
    newest_rx_ms_ = dgram.rx_unix_ms;
    prune(newest_rx_ms_);
  }

  const std::uint64_t key = (static_cast<std::uint64_t>(frame.dev_addr) << 16) | frame.fcnt;
  if (auto it = recent_.find(key); it != recent_.end() &&
                                   std::llabs(dgram.rx_unix_ms - it->second) <= kDedupWindowMs) {
    ++metrics_.duplicates;
    return Duplicate{Duplicate::Reason::kWindow};
  }
  if (auto it = last_fcnt_.find(frame.dev_addr); it != last_fcnt_.end()) {
    const auto delta = static_cast<std::uint16_t>(frame.fcnt - it->second);
    if (delta == 0 || delta >= 0x8000) {
      ++metrics_.duplicates;
      ++metrics_.stale_counters;
      return Duplicate{Duplicate::Reason::kStaleCounter};
    }
  }

  recent_[key] = dgram.rx_unix_ms;
  last_fcnt_[frame.dev_addr] = frame.fcnt;
  ++metrics_.new_fixes;
  return NewFix{frame.dev_addr, frame.fcnt, dgram.gateway_id, dgram.rx_unix_ms, fix};
}

void NetworkServer::prune(std::int64_t now_ms) {
  std::erase_if(recent_, [now_ms](const auto& kv) { return kv.second < now_ms - 2 * kDedupWindowMs; });
}

ServerMetrics NetworkServer::metrics() const {
  std::lock_guard lock(mutex_);
  return metrics_;
}

}  // namespace flightline::lora
