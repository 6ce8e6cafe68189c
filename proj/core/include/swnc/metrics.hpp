#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "swnc/channel.hpp"

namespace swnc {

enum class Scenario { kSrArq, kSwncEndToEnd, kSwncRecoder };

std::string to_string(Scenario scenario);
/// Accepts "srarq", "e2e" and "recoder" (and the enum-style names).
std::optional<Scenario> parse_scenario(std::string_view text);

struct RunMetrics {
  bool completed = false;
  Slot completion_slots = 0;  // slot_cap when the run did not complete
  std::uint64_t total_transmissions = 0;
  std::uint64_t tx_link1 = 0;
  std::uint64_t tx_link2 = 0;
  std::uint64_t useful_packets = 0;  // distinct source packets decoded at the sink
  double success_ratio = 0.0;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Loss probability of the two links in cascade.
double combined_loss(double eps1, double eps2);

/// Goodput ceiling: the min-cut for the recoder, the cascaded channel for the
/// schemes that only code (or retransmit) end to end.
double theoretical_success_ratio(Scenario scenario, double eps1, double eps2);

/// Incremental counters fed by a running simulation.
class MetricsCollector {
 public:
  void on_transmit(int link);
  void on_decoded() { ++useful_; }
  void on_complete(Slot slot);
  RunMetrics finish(Slot slot_cap) const;

 private:
  std::uint64_t tx1_ = 0;
  std::uint64_t tx2_ = 0;
  std::uint64_t useful_ = 0;
  std::optional<Slot> completed_at_;
};

/// Recomputes the metrics from a recorded event log.
RunMetrics collect(const EventLog& events, Slot slot_cap);

}  // namespace swnc
