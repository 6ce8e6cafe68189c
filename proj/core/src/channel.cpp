#include "swnc/channel.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swnc {

ErasureChannel::ErasureChannel(double epsilon, Slot forward_delay, std::uint64_t seed)
    : epsilon_(epsilon), forward_delay_(forward_delay), rng_(seed) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("channel loss probability must be in [0, 1]");
  if (forward_delay < 1) throw std::invalid_argument("forward delay must be at least 1 slot");
}

ErasureChannel::ErasureChannel(ScriptedLosses losses, Slot forward_delay)
    : forward_delay_(forward_delay), rng_(0), scripted_(std::move(losses)) {
  if (forward_delay < 1) throw std::invalid_argument("forward delay must be at least 1 slot");
}

std::optional<Slot> ErasureChannel::send(Slot slot) {
  const bool lost = scripted_ ? scripted_->contains(slot) : rng_.bernoulli(epsilon_);
  if (lost) return std::nullopt;
  return slot + forward_delay_;
}

LossTrace parse_loss_trace(std::istream& in) {
  LossTrace trace;
  ScriptedLosses* current = &trace.link1;
  trace.has_link1 = true;
  bool explicit_link1 = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    if (token == "[link1]") {
      current = &trace.link1;
      explicit_link1 = true;
    } else if (token == "[link2]") {
      current = &trace.link2;
      trace.has_link2 = true;
    } else {
      std::size_t used = 0;
      unsigned long long slot = 0;
      try {
        slot = std::stoull(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || token.front() == '-')
        throw std::invalid_argument("loss trace line " + std::to_string(line_no) +
                                    ": expected a slot number, got '" + token + "'");
      current->insert(slot);
    }
    if (fields >> token)
      throw std::invalid_argument("loss trace line " + std::to_string(line_no) +
                                  ": one value per line");
  }
  trace.has_link1 = explicit_link1 || !trace.link1.empty() || !trace.has_link2;
  return trace;
}

LossTrace load_loss_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open loss trace " + path);
  return parse_loss_trace(in);
}

namespace {

const char* node_name(NodeRole node) {
  switch (node) {
    case NodeRole::kSource: return "source";
    case NodeRole::kRelay: return "relay";
    case NodeRole::kSink: return "sink";
  }
  return "?";
}

}  // namespace

std::string to_string(const TraceEvent& e) {
  std::ostringstream out;
  out << "slot " << e.slot << ' ' << node_name(e.node) << ' ';
  switch (e.kind) {
    case TraceKind::kTransmit:
      out << "tx link" << e.link << (e.repair ? (e.extra ? " extra repair" : " repair") : " data")
          << " window [" << e.first << ".." << e.second << ']';
      break;
    case TraceKind::kLost:
      out << "lost link" << e.link << " window [" << e.first << ".." << e.second << ']';
      break;
    case TraceKind::kStored:
      out << "stored window [" << e.first << ".." << e.second << ']';
      break;
    case TraceKind::kDiscarded:
      out << "discarded non-innovative window [" << e.first << ".." << e.second << ']';
      break;
    case TraceKind::kForwarded:
      out << "queued for forwarding [" << e.first << ".." << e.second << ']';
      break;
    case TraceKind::kSinkState:
      out << "state fully=" << e.first << " partial=" << e.second;
      break;
    case TraceKind::kDecoded:
      out << "decoded packet " << e.first;
      break;
    case TraceKind::kFeedback:
      out << "feedback fully=" << e.first << " partial=" << e.second;
      break;
    case TraceKind::kAcknowledged:
      out << "all " << e.first << " packets acknowledged";
      break;
  }
  return out.str();
}

}  // namespace swnc
