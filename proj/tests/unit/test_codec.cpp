#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "swnc/codec.hpp"

using namespace swnc;

namespace {

Bytes random_payload(Rng& rng, std::size_t n) {
  Bytes b(n);
  for (auto& v : b) v = rng.next_byte();
  return b;
}

// Global coefficient row of a packet, widened to `width` columns.
std::vector<std::uint8_t> global_row(const CodedPacket& p, std::size_t width) {
  std::vector<std::uint8_t> row(width, 0);
  for (std::uint32_t i = 0; i < p.header.window_size; ++i)
    row.at(p.header.window_opening + i) = p.coefficients[i];
  return row;
}

EncoderConfig config(CodeRate rate, std::size_t window = 255, std::size_t payload = 16,
                     OverflowPolicy policy = OverflowPolicy::kHoldAndRepair) {
  return EncoderConfig{rate, window, policy, payload};
}

}  // namespace

// ---------------------------------------------------------------------------
// Code rates

TEST(CodeRate, ParseAndFormat) {
  EXPECT_EQ(CodeRate::parse("4/5"), (CodeRate{4, 5}));
  EXPECT_EQ((CodeRate{3, 4}).to_string(), "3/4");
  EXPECT_DOUBLE_EQ((CodeRate{3, 4}).value(), 0.75);
  EXPECT_FALSE((CodeRate{1, 1}).has_repairs());
  for (const char* bad : {"45", "5/4", "0/3", "a/b", "3/", "/4", "3/4x"})
    EXPECT_THROW(CodeRate::parse(bad), std::invalid_argument) << bad;
}

TEST(CodeRate, SelectionMatchesExactOracle) {
  // Targets given as exact fractions so the oracle never touches floating point.
  struct Case {
    std::uint64_t num, den;
  };
  for (const Case c : {Case{94, 100}, Case{84, 100}, Case{7975, 10000}, Case{1, 2}, Case{99, 100},
                       Case{1, 1}, Case{2, 3}, Case{70, 100}, Case{3, 20}}) {
    const auto want = oracle::best_rate_below(c.num, c.den);
    const CodeRate got = select_code_rate(static_cast<double>(c.num) / static_cast<double>(c.den));
    EXPECT_EQ(got, (CodeRate{want.k, want.n})) << c.num << "/" << c.den;
  }
}

TEST(CodeRate, DefaultMarginOperatingPoint) {
  // Frozen from the oracle above: 0.94 -> 15/16, 0.84 -> 5/6, 0.7975 -> 11/14.
  EXPECT_EQ(select_code_rate(0.05, 0.01), (CodeRate{15, 16}));
  EXPECT_EQ(select_code_rate(0.15, 0.01), (CodeRate{5, 6}));
  EXPECT_EQ(select_code_rate(1.0 - 0.95 * 0.85, 0.01), (CodeRate{11, 14}));
}

TEST(CodeRate, SelectionNeverExceedsTarget) {
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const double target = 0.0625 + rng.next_unit() * (1.0 - 0.0625);
    const CodeRate r = select_code_rate(target);
    ASSERT_LE(r.value(), target + 1e-12);
    ASSERT_LE(r.n, 16u);
  }
}

TEST(RepairSchedule, FourFifthsCycle) {
  RepairSchedule s(CodeRate{4, 5});
  std::string pattern;
  for (int i = 0; i < 10; ++i) {
    pattern += s.repair_due() ? 'R' : 'D';
    s.advance();
  }
  EXPECT_EQ(pattern, "DDDDRDDDDR");
  s.advance();
  s.advance();
  s.advance();
  s.advance();
  ASSERT_TRUE(s.repair_due());
  s.skip_repairs();
  EXPECT_EQ(s.position(), 0u);
}

// ---------------------------------------------------------------------------
// Encoder

TEST(Encoder, PushIntoEmptyWindow) {
  Encoder e(config(CodeRate{4, 5}));
  Rng rng(1);
  EXPECT_EQ(e.push({0, random_payload(rng, 16)}), PushResult::kAccepted);
  EXPECT_EQ(e.window_size(), 1u);
  EXPECT_EQ(e.window_opening(), 0u);
}

TEST(Encoder, DropOldestOnFullWindow) {
  Encoder e(config(CodeRate{4, 5}, 4, 16, OverflowPolicy::kDropOldest));
  Rng rng(1);
  for (std::uint32_t i = 0; i < 4; ++i) e.push({i, random_payload(rng, 16)});
  EXPECT_EQ(e.push({4, random_payload(rng, 16)}), PushResult::kDroppedOldest);
  EXPECT_EQ(e.window_opening(), 1u);
  EXPECT_EQ(e.window_size(), 4u);
}

TEST(Encoder, HoldAndRepairRefusesOnFullWindow) {
  Encoder e(config(CodeRate{4, 5}, 2));
  Rng rng(1);
  e.push({0, random_payload(rng, 16)});
  e.push({1, random_payload(rng, 16)});
  EXPECT_EQ(e.push({2, random_payload(rng, 16)}), PushResult::kRefused);
  EXPECT_EQ(e.next_index(), 2u);
  EXPECT_EQ(e.window_size(), 2u);
}

TEST(Encoder, NonContiguousPushAndBadPayloadRejected) {
  Encoder e(config(CodeRate{4, 5}));
  Rng rng(1);
  for (std::uint32_t i = 0; i < 3; ++i) e.push({i, random_payload(rng, 16)});
  EXPECT_THROW(e.push({5, random_payload(rng, 16)}), CodecError);
  EXPECT_THROW(e.push({3, random_payload(rng, 15)}), CodecError);
}

TEST(Encoder, SinglePacketWindowEmission) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Encoder e(config(CodeRate{4, 5}));
    Rng rng(seed);
    const Bytes p0 = random_payload(rng, 16);
    e.push({0, p0});
    const CodedPacket out = e.emit(rng);
    EXPECT_EQ(out.header.window_size, 1u);
    EXPECT_EQ(out.header.window_opening, 0u);
    const std::uint8_t c = out.coefficients[0];
    ASSERT_NE(c, 0);
    for (std::size_t i = 0; i < p0.size(); ++i) EXPECT_EQ(out.payload[i], oracle::mul(c, p0[i]));
  }
}

TEST(Encoder, FlagsFollowFourFifthsSchedule) {
  Encoder e(config(CodeRate{4, 5}, 8));
  Rng rng(4);
  std::string flags;
  for (std::uint32_t i = 0; i < 10; ++i) {
    if (!e.repair_due()) e.push({e.next_index(), random_payload(rng, 16)});
    const CodedPacket p = e.emit(rng);
    flags += p.header.source_fec && p.header.last_fec ? "11 " : (!p.header.source_fec && !p.header.last_fec ? "00 " : "?? ");
    EXPECT_EQ(p.coefficients.size(), 8u);
  }
  EXPECT_EQ(flags, "00 00 00 00 11 00 00 00 00 11 ");
}

TEST(Encoder, DataEmissionsNeverAllZero) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    Encoder e(config(CodeRate{1, 1}, 255, 4));
    for (std::uint32_t i = 0; i < 6; ++i) {
      e.push({i, random_payload(rng, 4)});
      const CodedPacket p = e.emit(rng);
      ASSERT_NE(p.coefficients[p.header.window_size - 1], 0);
    }
  }
}

TEST(Encoder, EmptyWindowEmitIsAnError) {
  Encoder e(config(CodeRate{4, 5}));
  Rng rng(1);
  EXPECT_THROW(e.emit(rng), CodecError);
  EXPECT_THROW(e.emit_repair(rng), CodecError);
}

TEST(Encoder, FeedbackSlidesWindow) {
  Encoder e(config(CodeRate{4, 5}));
  Rng rng(1);
  for (std::uint32_t i = 0; i < 8; ++i) e.push({i, random_payload(rng, 16)});
  e.apply_feedback({0, 0});
  EXPECT_EQ(e.window_opening(), 0u);
  e.apply_feedback({6, 1});
  EXPECT_EQ(e.window_opening(), 6u);
  EXPECT_EQ(e.window_size(), 2u);
  e.apply_feedback({3, 0});  // stale
  EXPECT_EQ(e.window_opening(), 6u);
}

TEST(Encoder, ExtraRepairLeavesCycleAlone) {
  Encoder e(config(CodeRate{4, 5}));
  Rng rng(1);
  e.push({0, random_payload(rng, 16)});
  e.emit(rng);
  const auto pos = e.cycle_position();
  const CodedPacket r = e.emit_repair(rng);
  EXPECT_TRUE(r.header.last_fec);
  EXPECT_EQ(e.cycle_position(), pos);
}

// ---------------------------------------------------------------------------
// Decoder

TEST(Decoder, FreshState) {
  Decoder d(16);
  EXPECT_EQ(d.feedback(), (FeedbackPacket{0, 0}));
  EXPECT_THROW(d.payload(0), CodecError);
}

TEST(Decoder, SinglePacketAndDuplicate) {
  Encoder e(config(CodeRate{1, 1}));
  Decoder d(16);
  Rng rng(2);
  const Bytes p0 = random_payload(rng, 16);
  e.push({0, p0});
  const CodedPacket pkt = e.emit(rng);
  const auto first = d.consume(pkt);
  EXPECT_TRUE(first.innovative());
  EXPECT_EQ(first.newly_decoded, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(d.fully_decoded(), 1u);
  EXPECT_FALSE(d.consume(pkt).innovative());
  const auto got = d.payload(0);
  EXPECT_TRUE(std::equal(got.begin(), got.end(), p0.begin(), p0.end()));
}

TEST(Decoder, ThreeByThreeAgainstOracleSolve) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Bytes> src(3);
    for (auto& s : src) s = random_payload(rng, 8);
    oracle::Matrix a(3, std::vector<std::uint8_t>(3)), b(3);
    std::vector<CodedPacket> pkts;
    for (int r = 0; r < 3; ++r) {
      CodedPacket p;
      p.header = CodingHeader{3, 0, 3, false, false};
      p.coefficients.resize(3);
      p.payload.assign(8, 0);
      for (int c = 0; c < 3; ++c) {
        const std::uint8_t k = rng.next_byte();
        p.coefficients[c] = k;
        a[r][c] = k;
        for (int j = 0; j < 8; ++j) p.payload[j] ^= oracle::mul(k, src[c][j]);
      }
      b[r] = p.payload;
      pkts.push_back(p);
    }
    Decoder d(8);
    for (const auto& p : pkts) d.consume(p);
    const auto solved = oracle::solve(a, b);
    if (!solved) {
      EXPECT_LT(d.rank(), 3u);
      continue;
    }
    ASSERT_EQ(d.fully_decoded(), 3u);
    for (std::uint32_t i = 0; i < 3; ++i) {
      const auto got = d.payload(i);
      EXPECT_TRUE(std::equal(got.begin(), got.end(), (*solved)[i].begin(), (*solved)[i].end()));
      EXPECT_EQ((*solved)[i], src[i]);
    }
  }
}

TEST(Decoder, RejectsMalformedPackets) {
  Decoder d(4);
  CodedPacket p;
  p.header = CodingHeader{2, 0, 2, false, false};
  p.coefficients = {1, 1};
  p.payload = {1, 2, 3};
  EXPECT_THROW(d.consume(p), CodecError);
  p.payload = {1, 2, 3, 4};
  p.coefficients = {1};
  EXPECT_THROW(d.consume(p), CodecError);
}

TEST(Decoder, EightPacketFlowTerminalState) {
  Encoder e(config(CodeRate{4, 5}, 16));
  Decoder d(16);
  Rng rng(8);
  for (std::uint32_t i = 0; i < 8; ++i) {
    e.push({i, random_payload(rng, 16)});
    d.consume(e.emit(rng));
  }
  EXPECT_EQ(d.feedback(), (FeedbackPacket{8, 0}));
}

// Random lossy streams with in-order feedback: innovative iff the oracle rank
// grows, fully + partial tracks the rank, and every recovered payload is right.
TEST(DecoderProperty, RankFeedbackAndPayloadInvariants) {
  Rng rng(4242);
  for (int trial = 0; trial < 150; ++trial) {
    const std::uint32_t n = static_cast<std::uint32_t>(rng.uniform(1, 40));
    const std::uint32_t k = static_cast<std::uint32_t>(rng.uniform(1, 8));
    const CodeRate rate{k, k + static_cast<std::uint32_t>(rng.uniform(0, 3))};
    const double loss = rng.next_unit() * 0.4;
    Encoder e(config(rate, 64, 12));
    Decoder d(12);
    std::vector<Bytes> src;
    oracle::Matrix rows;
    std::uint32_t last_fully = 0;
    for (int step = 0; step < 400 && d.fully_decoded() < n; ++step) {
      if (e.repair_due() && e.window_empty()) e.skip_repairs();
      CodedPacket p;
      if (e.repair_due()) {
        p = e.emit(rng);
      } else if (e.next_index() < n) {
        src.push_back(random_payload(rng, 12));
        ASSERT_EQ(e.push({e.next_index(), src.back()}), PushResult::kAccepted);
        p = e.emit(rng);
      } else if (!e.window_empty()) {
        p = e.emit_repair(rng);
      } else {
        break;
      }
      if (rng.bernoulli(loss)) continue;
      const std::size_t before = oracle::rank(rows);
      rows.push_back(global_row(p, n));
      const std::size_t after = oracle::rank(rows);
      const auto out = d.consume(p);
      ASSERT_EQ(out.innovative(), after > before);
      ASSERT_EQ(d.fully_decoded() + d.partial_rank(), after);
      ASSERT_GE(d.fully_decoded(), last_fully);
      last_fully = d.fully_decoded();
      for (std::uint32_t idx : out.newly_decoded) {
        const auto got = d.payload(idx);
        ASSERT_TRUE(std::equal(got.begin(), got.end(), src[idx].begin(), src[idx].end()));
      }
      e.apply_feedback(d.feedback());
    }
  }
}

TEST(DecoderProperty, LossFreeRunsDecodeEverything) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const std::uint32_t k = static_cast<std::uint32_t>(rng.uniform(1, 15));
    const CodeRate rate{k, k + static_cast<std::uint32_t>(rng.uniform(0, 3))};
    const std::uint32_t n = static_cast<std::uint32_t>(rng.uniform(1, 120));
    Encoder e(config(rate, 255, 20));
    Decoder d(20);
    std::vector<Bytes> src;
    while (e.next_index() < n || e.repair_due()) {
      if (!e.repair_due()) {
        src.push_back(random_payload(rng, 20));
        e.push({e.next_index(), src.back()});
      }
      d.consume(e.emit(rng));
    }
    ASSERT_EQ(d.fully_decoded(), n) << "seed " << seed;
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto got = d.payload(i);
      ASSERT_TRUE(std::equal(got.begin(), got.end(), src[i].begin(), src[i].end()));
    }
  }
}
