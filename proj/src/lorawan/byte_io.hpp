#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

namespace flightline::lora::detail {

template <std::unsigned_integral T>
void put_be(std::vector<std::uint8_t>& out, T value) {
  for (int shift = (sizeof(T) - 1) * 8; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

// Caller guarantees at least sizeof(T) bytes.
template <std::unsigned_integral T>
T get_be(std::span<const std::uint8_t> in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value = static_cast<T>((value << 8) | in[i]);
  }
  return value;
}

}  // namespace flightline::lora::detail
