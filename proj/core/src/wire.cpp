#include "swnc/wire.hpp"

#include <algorithm>
#include <cstdio>

namespace swnc {

namespace {

void put_u16(std::uint8_t* out, std::uint32_t v) {
  out[0] = static_cast<std::uint8_t>(v >> 8);
  out[1] = static_cast<std::uint8_t>(v & 0xFF);
}

std::uint32_t get_u16(const std::uint8_t* in) {
  return (static_cast<std::uint32_t>(in[0]) << 8) | in[1];
}

void check_header_ranges(const CodingHeader& h) {
  if (h.window_size < 1 || h.window_size > 255)
    throw WireError("window_size " + std::to_string(h.window_size) + " outside 1..255");
  if (h.window_opening > 0xFFFF)
    throw WireError("window_opening " + std::to_string(h.window_opening) + " exceeds 16 bits");
  if (h.coefficient_count < 1 || h.coefficient_count > 255)
    throw WireError("coefficient_count " + std::to_string(h.coefficient_count) +
                    " outside 1..255");
}

}  // namespace

void validate(const CodedPacket& packet) {
  const auto& h = packet.header;
  check_header_ranges(h);
  if (h.window_size > h.coefficient_count)
    throw WireError("window_size exceeds coefficient_count");
  if (packet.coefficients.size() != h.coefficient_count)
    throw WireError("coefficient vector length " + std::to_string(packet.coefficients.size()) +
                    " != coefficient_count " + std::to_string(h.coefficient_count));
  const auto tail = std::span(packet.coefficients).subspan(h.window_size);
  if (std::any_of(tail.begin(), tail.end(), [](std::uint8_t c) { return c != 0; }))
    throw WireError("nonzero coefficient outside the coding window");
}

void encode_header(const CodingHeader& header, std::span<std::uint8_t, kHeaderSize> out) {
  check_header_ranges(header);
  out[0] = static_cast<std::uint8_t>(header.window_size);
  put_u16(&out[1], header.window_opening);
  out[3] = static_cast<std::uint8_t>(header.coefficient_count);
  out[4] = static_cast<std::uint8_t>((header.source_fec ? kSourceFecBit : 0) |
                                     (header.last_fec ? kLastFecBit : 0));
}

Bytes encode_header(const CodingHeader& header) {
  Bytes out(kHeaderSize);
  encode_header(header, std::span<std::uint8_t, kHeaderSize>(out.data(), kHeaderSize));
  return out;
}

CodingHeader decode_header(std::span<const std::uint8_t> bytes, ParseMode mode) {
  if (bytes.size() < kHeaderSize)
    throw WireError("coding header needs 5 bytes, got " + std::to_string(bytes.size()));
  const std::uint8_t flags = bytes[4];
  if ((flags & kReservedBits) != 0 && mode == ParseMode::kStrict)
    throw WireError("reserved flag bits set");
  CodingHeader h;
  h.window_size = bytes[0];
  h.window_opening = get_u16(&bytes[1]);
  h.coefficient_count = bytes[3];
  h.source_fec = (flags & kSourceFecBit) != 0;
  h.last_fec = (flags & kLastFecBit) != 0;
  if (h.window_size == 0) throw WireError("window_size 0");
  if (h.coefficient_count == 0) throw WireError("coefficient_count 0");
  return h;
}

Bytes encode_packet(const CodedPacket& packet) {
  validate(packet);
  Bytes out(wire_packet_size(packet.coefficients.size(), packet.payload.size()));
  encode_header(packet.header, std::span<std::uint8_t, kHeaderSize>(out.data(), kHeaderSize));
  auto it = std::copy(packet.coefficients.begin(), packet.coefficients.end(),
                      out.begin() + kHeaderSize);
  std::copy(packet.payload.begin(), packet.payload.end(), it);
  return out;
}

CodedPacket decode_packet(std::span<const std::uint8_t> bytes,
                          std::optional<std::size_t> expected_payload_bytes, ParseMode mode) {
  CodedPacket p;
  p.header = decode_header(bytes, mode);
  const std::size_t coeff_end = kHeaderSize + p.header.coefficient_count;
  if (bytes.size() < coeff_end)
    throw WireError("packet truncated inside coefficient vector");
  const std::size_t payload_len = bytes.size() - coeff_end;
  if (expected_payload_bytes && payload_len != *expected_payload_bytes)
    throw WireError("payload length " + std::to_string(payload_len) + " != flow payload " +
                    std::to_string(*expected_payload_bytes));
  p.coefficients.assign(bytes.begin() + kHeaderSize, bytes.begin() + coeff_end);
  p.payload.assign(bytes.begin() + coeff_end, bytes.end());
  validate(p);
  return p;
}

Bytes encode_feedback(const FeedbackPacket& feedback) {
  if (feedback.fully_decoded > 0xFFFF || feedback.partially_decoded > 0xFFFF)
    throw WireError("feedback counter exceeds 16 bits");
  Bytes out(kFeedbackSize);
  put_u16(&out[0], feedback.fully_decoded);
  put_u16(&out[2], feedback.partially_decoded);
  return out;
}

FeedbackPacket decode_feedback(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFeedbackSize)
    throw WireError("feedback packet must be 4 bytes, got " + std::to_string(bytes.size()));
  return FeedbackPacket{get_u16(&bytes[0]), get_u16(&bytes[2])};
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  char buf[4];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buf, sizeof buf, i ? " %02X" : "%02X", bytes[i]);
    out += buf;
  }
  return out;
}

}  // namespace swnc
