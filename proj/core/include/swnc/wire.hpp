#pragma once

// Wire formats.
//
// Coding header (5 bytes):
//   byte 0     window_size        number of source packets spanned
//   bytes 1-2  window_opening     big-endian index of the first spanned packet
//   byte 3     coefficient_count  length of the coefficient vector that follows
//   byte 4     flags              bit7 source_fec, bit6 last_fec, bits5-0 zero
//
// Coded packet: header | coefficients[coefficient_count] | payload.
// Coefficients are left-aligned at window_opening and zero-padded, so every
// packet of a flow has the same length no matter how often it is recoded.
//
// Feedback (4 bytes): fully_decoded (u16 BE) | partially_decoded (u16 BE).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swnc {

using Bytes = std::vector<std::uint8_t>;

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseMode { kStrict, kTolerant };

inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::size_t kFeedbackSize = 4;
inline constexpr std::uint8_t kSourceFecBit = 0x80;
inline constexpr std::uint8_t kLastFecBit = 0x40;
inline constexpr std::uint8_t kReservedBits = 0x3F;

struct CodingHeader {
  // Held in wider integers so out-of-range values can be rejected at encode.
  std::uint32_t window_size = 1;
  std::uint32_t window_opening = 0;
  std::uint32_t coefficient_count = 1;
  bool source_fec = false;
  bool last_fec = false;

  std::uint32_t window_closing() const { return window_opening + window_size - 1; }
  bool is_repair() const { return last_fec; }

  friend bool operator==(const CodingHeader&, const CodingHeader&) = default;
};

struct CodedPacket {
  CodingHeader header;
  Bytes coefficients;  // size == header.coefficient_count
  Bytes payload;

  friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

// Throws WireError naming the first violated constraint.
void validate(const CodedPacket& packet);

struct FeedbackPacket {
  std::uint32_t fully_decoded = 0;
  std::uint32_t partially_decoded = 0;

  friend bool operator==(const FeedbackPacket&, const FeedbackPacket&) = default;
};

Bytes encode_header(const CodingHeader& header);
void encode_header(const CodingHeader& header, std::span<std::uint8_t, kHeaderSize> out);
CodingHeader decode_header(std::span<const std::uint8_t> bytes,
                           ParseMode mode = ParseMode::kStrict);

Bytes encode_packet(const CodedPacket& packet);

// Payload length is whatever follows the coefficients. When the flow's payload
// size is known, pass it so truncated or padded images are rejected.
CodedPacket decode_packet(std::span<const std::uint8_t> bytes,
                          std::optional<std::size_t> expected_payload_bytes = std::nullopt,
                          ParseMode mode = ParseMode::kStrict);

constexpr std::size_t wire_packet_size(std::size_t coefficient_count, std::size_t payload_bytes) {
  return kHeaderSize + coefficient_count + payload_bytes;
}

Bytes encode_feedback(const FeedbackPacket& feedback);
FeedbackPacket decode_feedback(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace swnc
