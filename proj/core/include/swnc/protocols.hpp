#pragma once

// Two-hop simulations of the three delivery schemes: selective-repeat ARQ
// through a store-and-forward relay, end-to-end sliding-window coding through
// a plain repeater, and sliding-window coding with a recoder at the middle
// node. Topology: source --link1--> relay --link2--> sink, with lossless
// feedback travelling back hop by hop.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "swnc/channel.hpp"
#include "swnc/codec.hpp"
#include "swnc/metrics.hpp"

namespace swnc {

/// Observer for every forward transmission (called before the loss draw).
using WireTap = std::function<void(int link, Slot slot, std::span<const std::uint8_t> bytes)>;

struct ScenarioConfig {
  Scenario scenario = Scenario::kSwncRecoder;
  double eps1 = 0.05;
  double eps2 = 0.15;
  Slot rtt = 20;  // per link: forward_delay + feedback delay
  std::uint32_t packets = 100;
  std::size_t payload_bytes = 100;
  std::optional<CodeRate> rate_source;   // derived from the losses and gamma when unset
  std::optional<CodeRate> rate_recoder;
  double gamma = 0.01;
  std::size_t max_window = 255;
  OverflowPolicy overflow = OverflowPolicy::kHoldAndRepair;
  Slot slot_cap = 500;
  std::uint64_t seed = 1;
  std::optional<ScriptedLosses> losses_link1;  // replaces the Bernoulli draw for that link
  std::optional<ScriptedLosses> losses_link2;
  Slot forward_delay = 1;
  bool record_trace = false;
  WireTap wire_tap;
};

struct RunResult {
  RunMetrics metrics;
  bool payloads_verified = false;  // every packet decoded at the sink equals its source payload
  CodeRate source_rate;
  CodeRate recoder_rate;
  EventLog trace;  // empty unless record_trace
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const ScenarioConfig& config);

Slot feedback_delay(const ScenarioConfig& config);

/// Source rate: targets link1 alone with a recoder, the cascade otherwise.
/// Selective-repeat ARQ sends no repairs and reports 1/1.
CodeRate effective_source_rate(const ScenarioConfig& config);
/// Recoder rate: targets link2 alone. Reported as 1/1 when there is no recoder.
CodeRate effective_recoder_rate(const ScenarioConfig& config);

RunResult run_scenario(const ScenarioConfig& config);

/// Eight packets through a recoder, rates 4/5 and 3/4, forward delay 1,
/// feedback delay 3, link1 losing the send at slot 8 and link2 the send at
/// slot 4. Reproduces the worked example: the slot-6 arrival at the recoder is
/// discarded and the sink reports 6 decoded and 1 partial at slot 11.
ScenarioConfig golden_trace_config();

}  // namespace swnc
