#pragma once

// Slotted simulation substrate: binary erasure channels, a deterministic
// slot scheduler and a structured event trace.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swnc/random.hpp"

namespace swnc {

using Slot = std::uint64_t;

/// Explicit set of transmission slots at which a channel drops the packet.
using ScriptedLosses = std::set<Slot>;

class ErasureChannel {
 public:
  /// Bernoulli losses drawn from the channel's own stream.
  ErasureChannel(double epsilon, Slot forward_delay, std::uint64_t seed);
  /// Losses exactly at the listed transmission slots.
  ErasureChannel(ScriptedLosses losses, Slot forward_delay);

  /// Delivery slot for a packet sent at `slot`, or nullopt if it is erased.
  std::optional<Slot> send(Slot slot);

  double epsilon() const { return epsilon_; }
  Slot forward_delay() const { return forward_delay_; }
  bool scripted() const { return scripted_.has_value(); }

 private:
  double epsilon_ = 0.0;
  Slot forward_delay_ = 1;
  Rng rng_;
  std::optional<ScriptedLosses> scripted_;
};

/// Loss traces per channel, parsed from text:
///
///   # comment
///   [link1]
///   8
///   [link2]
///   4
///
/// Integers before any section header belong to link1.
struct LossTrace {
  ScriptedLosses link1;
  ScriptedLosses link2;
  bool has_link1 = false;
  bool has_link2 = false;
};

/// Throws std::invalid_argument on malformed input.
LossTrace parse_loss_trace(std::istream& in);
LossTrace load_loss_trace(const std::string& path);

/// Deterministic slotted event queue. Events due at the same slot come out in
/// (class, insertion) order, so deliveries can be ranked ahead of feedback.
template <class Message>
class SlotScheduler {
 public:
  struct Event {
    Slot due = 0;
    int order_class = 0;
    std::uint64_t seq = 0;
    Message message;
  };

  Slot now() const { return now_; }
  bool idle() const { return queue_.empty(); }

  void schedule(Slot due, int order_class, Message message) {
    queue_.emplace(Key{due, order_class, seq_}, Event{due, order_class, seq_, std::move(message)});
    ++seq_;
  }

  /// Advances one slot and returns the events due in it.
  std::vector<Event> step() {
    ++now_;
    std::vector<Event> due;
    while (!queue_.empty() && queue_.begin()->first.due <= now_) {
      due.push_back(std::move(queue_.begin()->second));
      queue_.erase(queue_.begin());
    }
    return due;
  }

 private:
  struct Key {
    Slot due;
    int order_class;
    std::uint64_t seq;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  Slot now_ = 0;
  std::uint64_t seq_ = 0;
  std::map<Key, Event> queue_;
};

enum class NodeRole { kSource, kRelay, kSink };

enum class TraceKind {
  kTransmit,      // node sent a packet on its outgoing link (link, window, repair)
  kLost,          // that transmission was erased
  kStored,        // relay/recoder kept an arrival
  kDiscarded,     // recoder dropped a non-innovative arrival
  kForwarded,     // plain relay queued an arrival
  kSinkState,     // sink state after consuming arrivals (fully, partial)
  kDecoded,       // sink recovered source packet `index` for the first time
  kFeedback,      // feedback applied at node (fully, partial)
  kAcknowledged,  // source observed acknowledgement of every packet
};

struct TraceEvent {
  Slot slot = 0;
  TraceKind kind = TraceKind::kTransmit;
  NodeRole node = NodeRole::kSource;
  int link = 0;               // 1 = source->relay, 2 = relay->sink
  std::uint32_t first = 0;    // window opening / index / fully
  std::uint32_t second = 0;   // window closing / partial
  bool repair = false;
  bool extra = false;         // repair sent outside the k/n cycle

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string to_string(const TraceEvent& event);

using EventLog = std::vector<TraceEvent>;

}  // namespace swnc
