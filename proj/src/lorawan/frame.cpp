#include "flightline/lorawan/frame.hpp"

#include "byte_io.hpp"

namespace flightline::lora {

std::uint16_t crc16_ccitt_false(ByteView data) noexcept {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc ^= static_cast<std::uint16_t>(byte) << 8;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                           : static_cast<std::uint16_t>(crc << 1);
    }
  }
  return crc;
}

Bytes encode_uplink(const UplinkFrame& frame) {
  if (frame.payload.size() > kMaxPayload) {
    throw EncodeError("uplink payload of " + std::to_string(frame.payload.size()) +
                      " bytes exceeds " + std::to_string(kMaxPayload));
  }
  Bytes out;
  out.reserve(kFrameHeaderSize + frame.payload.size() + kFrameCrcSize);
  out.push_back(kFrameMagic);
  out.push_back(kFrameVersion);
  detail::put_be(out, frame.dev_addr);
  detail::put_be(out, frame.fcnt);
  out.push_back(frame.port);
  out.push_back(static_cast<std::uint8_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  detail::put_be(out, crc16_ccitt_false(out));
  return out;
}

UplinkFrame decode_uplink(ByteView data) {
  using Kind = DecodeError::Kind;
  if (data.size() < kFrameHeaderSize + kFrameCrcSize) {
    throw DecodeError(Kind::kTruncated, "frame shorter than header");
  }
  if (data[0] != kFrameMagic) throw DecodeError(Kind::kBadMagic, "bad frame magic");
  if (data[1] != kFrameVersion) throw DecodeError(Kind::kBadVersion, "unsupported frame version");
  const std::size_t len = data[9];
  const std::size_t expected = kFrameHeaderSize + len + kFrameCrcSize;
  if (data.size() < expected) throw DecodeError(Kind::kTruncated, "frame truncated");
  if (data.size() > expected || len > kMaxPayload) {
    throw DecodeError(Kind::kBadLength, "frame length field disagrees with datagram size");
  }
  const auto body = data.first(kFrameHeaderSize + len);
  const auto crc = detail::get_be<std::uint16_t>(data.subspan(kFrameHeaderSize + len));
  if (crc != crc16_ccitt_false(body)) throw DecodeError(Kind::kCrcMismatch, "frame CRC mismatch");

  UplinkFrame frame;
  frame.dev_addr = detail::get_be<std::uint32_t>(data.subspan(2));
  frame.fcnt = detail::get_be<std::uint16_t>(data.subspan(6));
  frame.port = data[8];
  frame.payload.assign(data.begin() + kFrameHeaderSize, data.begin() + kFrameHeaderSize + len);
  return frame;
}

Bytes encode_datagram(const GatewayDatagram& dgram) {
  Bytes out;
  out.reserve(kDatagramHeaderSize + dgram.frame.size());
  detail::put_be(out, dgram.gateway_id);
  detail::put_be(out, static_cast<std::uint64_t>(dgram.rx_unix_ms));
  out.insert(out.end(), dgram.frame.begin(), dgram.frame.end());
  return out;
}

GatewayDatagram decode_datagram(ByteView data) {
  if (data.size() < kDatagramHeaderSize) {
    throw DecodeError(DecodeError::Kind::kTruncated, "datagram shorter than gateway header");
  }
  GatewayDatagram dgram;
  dgram.gateway_id = detail::get_be<std::uint64_t>(data);
  dgram.rx_unix_ms = static_cast<std::int64_t>(detail::get_be<std::uint64_t>(data.subspan(8)));
  dgram.frame.assign(data.begin() + kDatagramHeaderSize, data.end());
  return dgram;
}

}  // namespace flightline::lora
