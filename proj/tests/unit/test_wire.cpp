#include <gtest/gtest.h>

#include "swnc/random.hpp"
#include "swnc/wire.hpp"

using namespace swnc;

namespace {

CodingHeader random_header(Rng& rng) {
  CodingHeader h;
  h.coefficient_count = static_cast<std::uint32_t>(rng.uniform(1, 255));
  h.window_size = static_cast<std::uint32_t>(rng.uniform(1, h.coefficient_count));
  h.window_opening = static_cast<std::uint32_t>(rng.uniform(0, 0xFFFF));
  h.source_fec = rng.bernoulli(0.5);
  h.last_fec = rng.bernoulli(0.5);
  return h;
}

CodedPacket random_packet(Rng& rng) {
  CodedPacket p;
  p.header = random_header(rng);
  p.coefficients.assign(p.header.coefficient_count, 0);
  for (std::uint32_t i = 0; i < p.header.window_size; ++i) p.coefficients[i] = rng.next_byte();
  p.payload.resize(rng.uniform(0, 200));
  for (auto& b : p.payload) b = rng.next_byte();
  return p;
}

}  // namespace

TEST(WireHeader, EncodeExamples) {
  EXPECT_EQ(to_hex(encode_header(CodingHeader{3, 0, 8, false, false})), "03 00 00 08 00");
  EXPECT_EQ(to_hex(encode_header(CodingHeader{1, 65535, 1, true, true})), "01 FF FF 01 C0");
}

TEST(WireHeader, EncodeRejectsOutOfRange) {
  EXPECT_THROW(encode_header(CodingHeader{1, 70000, 1, false, false}), WireError);
  EXPECT_THROW(encode_header(CodingHeader{0, 0, 1, false, false}), WireError);
  EXPECT_THROW(encode_header(CodingHeader{256, 0, 255, false, false}), WireError);
  EXPECT_THROW(encode_header(CodingHeader{1, 0, 256, false, false}), WireError);
}

TEST(WireHeader, DecodeExamples) {
  const Bytes b{0x03, 0x00, 0x00, 0x08, 0x00};
  EXPECT_EQ(decode_header(b), (CodingHeader{3, 0, 8, false, false}));
  const Bytes short_buf{0x03, 0x00, 0x00, 0x08};
  EXPECT_THROW(decode_header(short_buf), WireError);
}

TEST(WireHeader, ReservedBitsStrictVersusTolerant) {
  const Bytes b{0x01, 0x00, 0x01, 0x01, 0x3F};
  EXPECT_THROW(decode_header(b, ParseMode::kStrict), WireError);
  const CodingHeader h = decode_header(b, ParseMode::kTolerant);
  EXPECT_EQ(h.window_opening, 1u);
  EXPECT_FALSE(h.source_fec);
  EXPECT_FALSE(h.last_fec);
}

TEST(WireHeader, ZeroSizedFieldsRejected) {
  EXPECT_THROW(decode_header(Bytes{0x00, 0x00, 0x00, 0x01, 0x00}), WireError);
  EXPECT_THROW(decode_header(Bytes{0x01, 0x00, 0x00, 0x00, 0x00}), WireError);
}

TEST(WireHeader, ClosingIsDerived) {
  const CodingHeader h{4, 10, 8, false, false};
  EXPECT_EQ(h.window_closing(), 13u);
}

TEST(WirePacket, FlowSizeExample) {
  EXPECT_EQ(wire_packet_size(8, 100), 113u);
  CodedPacket p;
  p.header = CodingHeader{3, 0, 8, false, false};
  p.coefficients = {1, 2, 3, 0, 0, 0, 0, 0};
  p.payload.assign(100, 0xAA);
  EXPECT_EQ(encode_packet(p).size(), 113u);
}

TEST(WirePacket, TruncatedAndMismatchedRejected) {
  CodedPacket p;
  p.header = CodingHeader{2, 5, 4, false, false};
  p.coefficients = {7, 9, 0, 0};
  p.payload = {1, 2, 3};
  const Bytes image = encode_packet(p);
  EXPECT_THROW(decode_packet(std::span(image).first(7)), WireError);
  EXPECT_THROW(decode_packet(image, std::size_t{4}), WireError);
  EXPECT_EQ(decode_packet(image, std::size_t{3}), p);
}

TEST(WirePacket, ValidateRejectsInconsistentPackets) {
  CodedPacket p;
  p.header = CodingHeader{2, 0, 4, false, false};
  p.coefficients = {1, 1, 0};
  EXPECT_THROW(validate(p), WireError);  // vector shorter than coefficient_count
  p.coefficients = {1, 1, 0, 5};
  EXPECT_THROW(validate(p), WireError);  // support outside the window
  p.coefficients = {1, 1, 0, 0};
  p.header.window_size = 5;
  EXPECT_THROW(validate(p), WireError);  // window wider than the vector
}

TEST(WireFeedback, Examples) {
  EXPECT_EQ(to_hex(encode_feedback(FeedbackPacket{6, 1})), "00 06 00 01");
  EXPECT_EQ(to_hex(encode_feedback(FeedbackPacket{0, 0})), "00 00 00 00");
  EXPECT_THROW(encode_feedback(FeedbackPacket{0x10000, 0}), WireError);
  EXPECT_THROW(decode_feedback(Bytes{0, 6, 0}), WireError);
  EXPECT_THROW(decode_feedback(Bytes{0, 6, 0, 1, 0}), WireError);
}

TEST(WireProperty, HeaderRoundTrip) {
  Rng rng(101);
  for (int i = 0; i < 10000; ++i) {
    const CodingHeader h = random_header(rng);
    const Bytes b = encode_header(h);
    ASSERT_EQ(b.size(), kHeaderSize);
    ASSERT_EQ(b[4] & kReservedBits, 0);
    ASSERT_EQ(decode_header(b), h);
  }
}

TEST(WireProperty, PacketRoundTrip) {
  Rng rng(202);
  for (int i = 0; i < 10000; ++i) {
    const CodedPacket p = random_packet(rng);
    const Bytes b = encode_packet(p);
    ASSERT_EQ(b.size(), wire_packet_size(p.header.coefficient_count, p.payload.size()));
    ASSERT_EQ(decode_packet(b, p.payload.size()), p);
  }
}

TEST(WireProperty, FeedbackRoundTrip) {
  Rng rng(303);
  for (int i = 0; i < 10000; ++i) {
    const FeedbackPacket f{static_cast<std::uint32_t>(rng.uniform(0, 0xFFFF)),
                           static_cast<std::uint32_t>(rng.uniform(0, 0xFFFF))};
    const Bytes b = encode_feedback(f);
    ASSERT_EQ(b.size(), kFeedbackSize);
    ASSERT_EQ(decode_feedback(b), f);
  }
}
