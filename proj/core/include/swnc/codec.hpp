#pragma once

// Source-side sliding-window encoder and sink-side decoder.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swnc/random.hpp"
#include "swnc/wire.hpp"

namespace swnc {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// k data emissions followed by n - k repair emissions per cycle.
struct CodeRate {
  std::uint32_t k = 1;
  std::uint32_t n = 1;

  double value() const { return static_cast<double>(k) / static_cast<double>(n); }
  bool has_repairs() const { return k < n; }
  std::string to_string() const;

  /// Parses "k/n"; throws std::invalid_argument unless 1 <= k <= n.
  static CodeRate parse(std::string_view text);

  friend bool operator==(const CodeRate&, const CodeRate&) = default;
};

/// Largest k/n <= target with 1 <= k <= n <= max_n (ties go to the smaller n).
/// Falls back to 1/max_n when the target is below every candidate.
CodeRate select_code_rate(double target, std::uint32_t max_n = 16);

/// Rate for a link with loss probability `epsilon` and margin `gamma`:
/// target = (1 - epsilon) - gamma.
CodeRate select_code_rate(double epsilon, double gamma, std::uint32_t max_n = 16);

/// Position inside the k-data / (n-k)-repair cycle.
class RepairSchedule {
 public:
  explicit RepairSchedule(CodeRate rate) : rate_(rate) {}

  bool repair_due() const { return position_ >= rate_.k; }
  void advance() { position_ = (position_ + 1) % rate_.n; }
  /// Abandons the remaining repairs of the current cycle.
  void skip_repairs() {
    if (repair_due()) position_ = 0;
  }
  std::uint32_t position() const { return position_; }
  CodeRate rate() const { return rate_; }

 private:
  CodeRate rate_;
  std::uint32_t position_ = 0;
};

enum class OverflowPolicy { kHoldAndRepair, kDropOldest };

struct SourcePacket {
  std::uint32_t index = 0;
  Bytes payload;
};

struct EncoderConfig {
  CodeRate rate;
  std::size_t max_window = 255;  // also the flow-wide coefficient_count
  OverflowPolicy overflow = OverflowPolicy::kHoldAndRepair;
  std::size_t payload_bytes = 100;
};

enum class PushResult { kAccepted, kDroppedOldest, kRefused };

class Encoder {
 public:
  explicit Encoder(EncoderConfig config);

  /// Appends the next source packet. Under hold-and-repair a full window
  /// refuses the push; under drop-oldest the lowest index leaves the window.
  PushResult push(SourcePacket packet);

  /// Schedule-driven emission: a data emission while the cycle is in its data
  /// phase, a repair otherwise. Advances the cycle.
  CodedPacket emit(Rng& rng);

  /// Repair emission outside the cycle (nothing new to send). Cycle unchanged.
  CodedPacket emit_repair(Rng& rng);

  /// Slides the window past every packet the sink reports fully decoded.
  void apply_feedback(const FeedbackPacket& feedback);

  /// Moves a repair-due cycle back to its data phase (nothing left to protect).
  void skip_repairs() { schedule_.skip_repairs(); }

  bool repair_due() const { return schedule_.repair_due(); }
  bool window_full() const { return window_.size() >= config_.max_window; }
  bool window_empty() const { return window_.empty(); }
  bool has_fresh_packet() const { return fresh_; }

  std::uint32_t next_index() const { return next_index_; }
  std::uint32_t window_opening() const;
  std::size_t window_size() const { return window_.size(); }
  std::uint32_t cycle_position() const { return schedule_.position(); }
  const EncoderConfig& config() const { return config_; }

 private:
  CodedPacket combine(Rng& rng, bool repair);

  EncoderConfig config_;
  RepairSchedule schedule_;
  std::deque<SourcePacket> window_;
  std::uint32_t next_index_ = 0;
  bool fresh_ = false;
};

enum class ConsumeStatus { kInnovative, kRedundant };

struct ConsumeOutcome {
  ConsumeStatus status = ConsumeStatus::kRedundant;
  std::vector<std::uint32_t> newly_decoded;  // any index recovered by this packet

  bool innovative() const { return status == ConsumeStatus::kInnovative; }
};

/// Gaussian elimination over global packet indices. Pending rows are kept in
/// reduced row-echelon form: each is normalised to 1 at its pivot and is zero
/// on every other pivot column and on every decoded column.
class Decoder {
 public:
  explicit Decoder(std::size_t payload_bytes);

  ConsumeOutcome consume(const CodedPacket& packet);

  FeedbackPacket feedback() const {
    return FeedbackPacket{fully_decoded_, partial_rank()};
  }

  /// Length of the decoded prefix starting at index 0.
  std::uint32_t fully_decoded() const { return fully_decoded_; }
  std::uint32_t partial_rank() const { return static_cast<std::uint32_t>(rank() - fully_decoded_); }
  std::size_t rank() const { return decoded_count_ + pending_.size(); }
  std::size_t decoded_count() const { return decoded_count_; }

  bool is_decoded(std::uint32_t index) const {
    return index < decoded_.size() && decoded_[index];
  }
  /// Throws CodecError if `index` has not been recovered.
  std::span<const std::uint8_t> payload(std::uint32_t index) const;

 private:
  struct Row {
    std::uint32_t pivot = 0;  // global index of coeffs[0]
    Bytes coeffs;
    Bytes payload;
  };

  void mark_decoded(std::uint32_t index, Bytes payload, std::vector<std::uint32_t>& out);

  std::size_t payload_bytes_;
  std::vector<bool> decoded_;
  std::vector<Bytes> payloads_;
  std::size_t decoded_count_ = 0;
  std::uint32_t fully_decoded_ = 0;
  std::map<std::uint32_t, Row> pending_;
};

}  // namespace swnc
