#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flightline::lora {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::uint8_t kFrameMagic = 0x4C;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kMaxPayload = 51;
inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr std::size_t kFrameCrcSize = 2;

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor.
std::uint16_t crc16_ccitt_false(ByteView data) noexcept;

struct UplinkFrame {
  std::uint32_t dev_addr = 0;
  std::uint16_t fcnt = 0;
  std::uint8_t port = 0;
  Bytes payload;

  friend bool operator==(const UplinkFrame&, const UplinkFrame&) = default;
};

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { kTruncated, kBadMagic, kBadVersion, kBadLength, kCrcMismatch, kBadValue };

  DecodeError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Layout (big-endian):
//   0x4C | 0x01 | dev_addr(4) | fcnt(2) | port(1) | len(1) | payload(len) | crc16(2)
// The CRC covers every byte before it.
Bytes encode_uplink(const UplinkFrame& frame);
UplinkFrame decode_uplink(ByteView data);

/// A frame as forwarded by a gateway: gateway_id(8) | rx_unix_ms(8) | frame bytes.
struct GatewayDatagram {
  std::uint64_t gateway_id = 0;
  std::int64_t rx_unix_ms = 0;
  Bytes frame;

  friend bool operator==(const GatewayDatagram&, const GatewayDatagram&) = default;
};

inline constexpr std::size_t kDatagramHeaderSize = 16;

Bytes encode_datagram(const GatewayDatagram& dgram);
/// Only the 16-byte wrapper is checked here; the inner frame is decoded by the server.
GatewayDatagram decode_datagram(ByteView data);

}  // namespace flightline::lora
