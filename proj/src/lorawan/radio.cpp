#include "flightline/lorawan/radio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flightline::lora {

void validate(const RadioParams& params) {
  if (params.spreading_factor < 7 || params.spreading_factor > 12) {
    throw RadioParamError("spreading factor must be 7..12, got " +
                          std::to_string(params.spreading_factor));
  }
  if (params.bandwidth_hz != 125'000 && params.bandwidth_hz != 250'000 &&
      params.bandwidth_hz != 500'000) {
    throw RadioParamError("bandwidth must be 125000, 250000 or 500000 Hz");
  }
  if (params.coding_rate_index < 1 || params.coding_rate_index > 4) {
    throw RadioParamError("coding rate index must be 1..4");
  }
  if (params.preamble_symbols < 0) throw RadioParamError("negative preamble length");
}

double airtime_ms(const RadioParams& params, int payload_len_bytes) {
  validate(params);
  if (payload_len_bytes < 0 || payload_len_bytes > 255) {
    throw RadioParamError("payload length must be 0..255");
  }
  const int sf = params.spreading_factor;
  const double symbol_ms = std::ldexp(1.0, sf) / params.bandwidth_hz * 1000.0;
  const int de = symbol_ms > 16.0 ? 1 : 0;
  const int header = params.explicit_header ? 1 : 0;
  const int crc = params.crc_on ? 1 : 0;

  const int numerator = 8 * payload_len_bytes - 4 * sf + 28 + 16 * crc - 20 * (1 - header);
  const int denominator = 4 * (sf - 2 * de);
  // Integer ceil division; numerator may be negative for tiny payloads.
  int blocks = numerator > 0 ? (numerator + denominator - 1) / denominator : -((-numerator) / denominator);
  const int payload_symbols = 8 + std::max(blocks * (params.coding_rate_index + 4), 0);

  const double preamble_ms = (params.preamble_symbols + 4.25) * symbol_ms;
  return preamble_ms + payload_symbols * symbol_ms;
}

DutyCycleGate::DutyCycleGate(std::int64_t window_ms, double budget_ms)
    : window_ms_(window_ms), budget_ms_(budget_ms) {}

void DutyCycleGate::expire(std::int64_t now_ms) {
  while (!bookings_.empty() && bookings_.front().at_ms <= now_ms - window_ms_) {
    bookings_.pop_front();
  }
}

double DutyCycleGate::spent_ms(std::int64_t now_ms) const {
  double total = 0.0;
  for (const auto& b : bookings_) {
    if (b.at_ms > now_ms - window_ms_ && b.at_ms <= now_ms) total += b.airtime_ms;
  }
  return total;
}

DutyDecision DutyCycleGate::request(double airtime_ms, std::int64_t now_ms) {
  expire(now_ms);
  double spent = 0.0;
  for (const auto& b : bookings_) spent += b.airtime_ms;
  if (spent + airtime_ms <= budget_ms_) {
    bookings_.push_back({now_ms, airtime_ms});
    return Allow{};
  }
  // Walk bookings oldest-first until enough budget would have expired.
  for (const auto& b : bookings_) {
    spent -= b.airtime_ms;
    if (spent + airtime_ms <= budget_ms_) return Defer{b.at_ms + window_ms_};
  }
  // Single transmission larger than the whole budget.
  return Defer{now_ms + window_ms_};
}

}  // namespace flightline::lora
