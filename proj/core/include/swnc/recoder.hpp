#pragma once

// On-the-fly sliding-window recoder for an intermediate node.
//
// Incoming coded packets are kept only if they add a degree of freedom the
// sink does not already have. At every send slot the node mixes the rows of
// its recoding window with fresh local coefficients, applying the same
// combination to the stored coefficient vectors and to the stored payloads, so
// the outgoing coefficient vector stays expressed over original source
// packets. The outgoing window runs from the opening of the first windowed row
// to the closing of the last one.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "swnc/codec.hpp"
#include "swnc/random.hpp"
#include "swnc/wire.hpp"

namespace swnc {

struct RecoderConfig {
  CodeRate rate;
  std::size_t coefficient_count = 255;  // flow-wide, fixed by the source
  std::size_t payload_bytes = 100;
  std::size_t max_buffer = 255;
  OverflowPolicy overflow = OverflowPolicy::kDropOldest;
};

enum class BufferOutcome { kStored, kDiscarded };

class Recoder {
 public:
  struct StoredRow {
    std::uint32_t opening = 0;
    std::uint32_t closing = 0;
    Bytes coeffs;  // coeffs[i] multiplies source packet opening + i
    Bytes payload;
    std::uint64_t arrival = 0;
    bool windowed = false;
  };

  explicit Recoder(RecoderConfig config);

  /// Stores the packet if it raises the rank of the buffer (taken over source
  /// indices not yet acknowledged by the sink); discards it otherwise.
  BufferOutcome consume(const CodedPacket& packet);

  /// Schedule-driven emission. On a data position the next buffered row joins
  /// the recoding window first (requires has_unwindowed_rows()); on a repair
  /// position the current window is reused (requires a non-empty window).
  CodedPacket emit(Rng& rng);

  /// Repair over the current window outside the cycle. Cycle unchanged.
  CodedPacket emit_repair(Rng& rng);

  /// Prunes rows whose closing index is below the sink's decoded prefix.
  void apply_feedback(const FeedbackPacket& feedback);

  /// Moves a repair-due cycle back to its data phase.
  void skip_repairs() { schedule_.skip_repairs(); }

  bool repair_due() const { return schedule_.repair_due(); }
  bool has_unwindowed_rows() const;
  bool window_empty() const;
  std::size_t buffer_size() const { return rows_.size(); }
  std::size_t window_size() const;
  std::size_t rank() const { return basis_.size(); }
  std::uint32_t horizon() const { return horizon_; }
  std::uint32_t cycle_position() const { return schedule_.position(); }
  const std::vector<StoredRow>& rows() const { return rows_; }
  const RecoderConfig& config() const { return config_; }

 private:
  struct BasisRow {
    std::uint32_t pivot = 0;
    Bytes coeffs;  // coeffs[0] == 1
  };

  // Reduces `coeffs` (aligned at `offset`, restricted to >= horizon_) against
  // the basis; returns the residual pivot row, empty if dependent.
  BasisRow reduce(std::uint32_t offset, const Bytes& coeffs) const;
  void rebuild_basis();
  std::uint64_t window_next_row();  // returns the arrival id of the added row
  void fit_window_span();
  CodedPacket combine(Rng& rng, bool repair, std::optional<std::uint64_t> newest);

  RecoderConfig config_;
  RepairSchedule schedule_;
  std::vector<StoredRow> rows_;  // sorted by (opening, arrival)
  std::map<std::uint32_t, BasisRow> basis_;
  std::uint32_t horizon_ = 0;
  std::uint64_t arrivals_ = 0;
};

}  // namespace swnc
