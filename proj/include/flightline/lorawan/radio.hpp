#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <variant>

namespace flightline::lora {

class RadioParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RadioParams {
  int spreading_factor = 7;
  int bandwidth_hz = 125'000;
  int coding_rate_index = 1;  // 1..4 -> 4/5..4/8
  int preamble_symbols = 8;
  bool explicit_header = true;
  bool crc_on = true;
};

void validate(const RadioParams& params);

/// Time on air of a LoRa packet carrying `payload_len_bytes` PHY payload bytes.
///
/// Uses the standard Semtech model: symbol time 2^SF/BW, preamble of
/// (n_preamble + 4.25) symbols, and
///   8 + max(ceil((8PL - 4SF + 28 + 16CRC - 20(1-H)) / (4(SF - 2DE))) (CR + 4), 0)
/// payload symbols, with low data rate optimisation DE enabled when a symbol
/// lasts longer than 16 ms.
double airtime_ms(const RadioParams& params, int payload_len_bytes);

struct Allow {};
struct Defer {
  std::int64_t next_allowed_ms;
};
using DutyDecision = std::variant<Allow, Defer>;

/// Trailing-window airtime budget for one device (1% of one hour by default).
class DutyCycleGate {
 public:
  static constexpr std::int64_t kWindowMs = 3'600'000;
  static constexpr double kBudgetMs = 36'000.0;

  explicit DutyCycleGate(std::int64_t window_ms = kWindowMs, double budget_ms = kBudgetMs);

  /// Grants the transmission and books its airtime, or returns the earliest time it could go.
  DutyDecision request(double airtime_ms, std::int64_t now_ms);

  /// Airtime booked in (now - window, now].
  double spent_ms(std::int64_t now_ms) const;

 private:
  struct Booking {
    std::int64_t at_ms;
    double airtime_ms;
  };

  void expire(std::int64_t now_ms);

  std::int64_t window_ms_;
  double budget_ms_;
  std::deque<Booking> bookings_;
};

}  // namespace flightline::lora
