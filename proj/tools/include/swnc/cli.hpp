#pragma once

// Experiment driver behind swnc-sim: sweep expansion, CSV output, config
// validation and golden-trace replay. Kept as a library so tests can drive it
// in-process.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swnc/protocols.hpp"

namespace swnc::cli {

struct SweepConfig {
  std::vector<Scenario> scenarios{Scenario::kSrArq, Scenario::kSwncEndToEnd,
                                  Scenario::kSwncRecoder};
  std::vector<double> eps1{0.05};
  std::vector<double> eps2{0.15};
  std::vector<Slot> rtt{20};
  std::vector<std::uint64_t> seeds{1};
  ScenarioConfig base;  // everything that is not a sweep axis
  unsigned jobs = 1;
};

/// "0.05", "0.05,0.1" or "start:stop:step" (inclusive).
std::vector<double> parse_real_list(std::string_view text);
/// Same forms over non-negative integers, plus "lo-hi" ranges.
std::vector<std::uint64_t> parse_int_list(std::string_view text);
/// "all" or a comma list of srarq / e2e / recoder.
std::vector<Scenario> parse_scenarios(std::string_view text);

/// Cartesian product in the order scenario, eps1, eps2, rtt, seed.
std::vector<ScenarioConfig> expand(const SweepConfig& sweep);

std::string csv_header();
std::string csv_row(const ScenarioConfig& config, const RunResult& result);

/// Runs every expanded point (in parallel when jobs > 1) and writes the CSV.
/// Row order depends only on the sweep, never on scheduling.
std::vector<RunResult> run_sweep(const SweepConfig& sweep, std::ostream& out);

/// Human-readable per-scenario means of a finished sweep.
void write_summary(const std::vector<ScenarioConfig>& points, const std::vector<RunResult>& results,
                   std::ostream& out);

struct Finding {
  enum class Level { kWarning, kError } level;
  std::string message;
};

/// Consistency checks that do not stop a run: code rate above 1 - loss
/// (negative gamma), window bounds versus header field widths, and so on.
std::vector<Finding> validate_report(const SweepConfig& sweep);

/// Slot-by-slot event log of the worked two-hop example.
void write_golden_trace(std::ostream& out);

/// Full command line entry point; returns the process exit status.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swnc::cli
