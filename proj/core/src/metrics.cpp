#include "swnc/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace swnc {

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kSrArq: return "srarq";
    case Scenario::kSwncEndToEnd: return "e2e";
    case Scenario::kSwncRecoder: return "recoder";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  if (text == "srarq" || text == "SrArq") return Scenario::kSrArq;
  if (text == "e2e" || text == "SwncEndToEnd") return Scenario::kSwncEndToEnd;
  if (text == "recoder" || text == "SwncRecoder") return Scenario::kSwncRecoder;
  return std::nullopt;
}

double combined_loss(double eps1, double eps2) { return 1.0 - (1.0 - eps1) * (1.0 - eps2); }

double theoretical_success_ratio(Scenario scenario, double eps1, double eps2) {
  if (scenario == Scenario::kSwncRecoder) return std::min(1.0 - eps1, 1.0 - eps2);
  return (1.0 - eps1) * (1.0 - eps2);
}

void MetricsCollector::on_transmit(int link) {
  if (link == 1) {
    ++tx1_;
  } else if (link == 2) {
    ++tx2_;
  } else {
    throw std::invalid_argument("unknown link " + std::to_string(link));
  }
}

void MetricsCollector::on_complete(Slot slot) {
  if (!completed_at_) completed_at_ = slot;
}

RunMetrics MetricsCollector::finish(Slot slot_cap) const {
  RunMetrics m;
  m.completed = completed_at_.has_value();
  m.completion_slots = completed_at_.value_or(slot_cap);
  m.tx_link1 = tx1_;
  m.tx_link2 = tx2_;
  m.total_transmissions = tx1_ + tx2_;
  m.useful_packets = useful_;
  m.success_ratio =
      m.completion_slots == 0 ? 0.0 : static_cast<double>(useful_) / static_cast<double>(m.completion_slots);
  return m;
}

RunMetrics collect(const EventLog& events, Slot slot_cap) {
  MetricsCollector c;
  for (const auto& e : events) {
    switch (e.kind) {
      case TraceKind::kTransmit: c.on_transmit(e.link); break;
      case TraceKind::kDecoded: c.on_decoded(); break;
      case TraceKind::kAcknowledged: c.on_complete(e.slot); break;
      default: break;
    }
  }
  return c.finish(slot_cap);
}

}  // namespace swnc
