#include "swnc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <variant>

#include "swnc/recoder.hpp"
#include "swnc/wire.hpp"

namespace swnc {

namespace {

// Stream ids keep every random consumer independent of the others.
constexpr std::uint64_t kPayloadStream = 1;
constexpr std::uint64_t kSourceStream = 2;
constexpr std::uint64_t kRecoderStream = 3;
constexpr std::uint64_t kLinkStreamBase = 10;

// Within a slot, packet deliveries are handled before feedback.
constexpr int kDeliveryClass = 0;
constexpr int kFeedbackClass = 1;

std::vector<Bytes> make_payloads(const ScenarioConfig& cfg) {
  Rng rng = Rng::stream(cfg.seed, kPayloadStream);
  std::vector<Bytes> out(cfg.packets, Bytes(cfg.payload_bytes));
  for (auto& p : out)
    for (auto& b : p) b = rng.next_byte();
  return out;
}

ErasureChannel make_channel(const ScenarioConfig& cfg, int link) {
  const auto& scripted = link == 1 ? cfg.losses_link1 : cfg.losses_link2;
  if (scripted) return ErasureChannel(*scripted, cfg.forward_delay);
  const std::uint64_t seed = Rng::stream(cfg.seed, kLinkStreamBase + link).next_u64();
  return ErasureChannel(link == 1 ? cfg.eps1 : cfg.eps2, cfg.forward_delay, seed);
}

class Tracer {
 public:
  explicit Tracer(bool enabled) : enabled_(enabled) {}
  void add(Slot slot, TraceKind kind, NodeRole node, int link = 0, std::uint32_t first = 0,
           std::uint32_t second = 0, bool repair = false, bool extra = false) {
    if (enabled_) log_.push_back(TraceEvent{slot, kind, node, link, first, second, repair, extra});
  }
  EventLog take() { return std::move(log_); }

 private:
  bool enabled_;
  EventLog log_;
};

// ---------------------------------------------------------------------------
// Coded scenarios: end-to-end coding or coding with a recoder.

struct WireDelivery {
  int link = 0;
  Bytes bytes;
};

struct FeedbackDelivery {
  NodeRole to = NodeRole::kSource;
  Bytes bytes;  // 4-byte feedback image
};

using CodedMessage = std::variant<WireDelivery, FeedbackDelivery>;

class CodedRun {
 public:
  explicit CodedRun(const ScenarioConfig& cfg)
      : cfg_(cfg),
        fd_(feedback_delay(cfg)),
        payloads_(make_payloads(cfg)),
        src_rate_(effective_source_rate(cfg)),
        rec_rate_(effective_recoder_rate(cfg)),
        encoder_(EncoderConfig{src_rate_, cfg.max_window, cfg.overflow, cfg.payload_bytes}),
        decoder_(cfg.payload_bytes),
        link1_(make_channel(cfg, 1)),
        link2_(make_channel(cfg, 2)),
        src_rng_(Rng::stream(cfg.seed, kSourceStream)),
        rec_rng_(Rng::stream(cfg.seed, kRecoderStream)),
        trace_(cfg.record_trace) {
    if (cfg.scenario == Scenario::kSwncRecoder)
      recoder_.emplace(RecoderConfig{rec_rate_, cfg.max_window, cfg.payload_bytes, cfg.max_window,
                                     OverflowPolicy::kDropOldest});
  }

  RunResult run() {
    for (Slot slot = 1; slot <= cfg_.slot_cap && !done_; ++slot) {
      bool sink_received = false;
      for (auto& ev : sched_.step()) {
        if (auto* d = std::get_if<WireDelivery>(&ev.message)) {
          if (d->link == 1) {
            relay_receive(slot, std::move(d->bytes));
          } else {
            sink_receive(slot, d->bytes);
            sink_received = true;
          }
        } else {
          feedback_receive(slot, std::get<FeedbackDelivery>(ev.message));
          if (done_) break;
        }
      }
      if (sink_received) sink_feedback(slot);
      if (done_) break;
      source_transmit(slot);
      relay_transmit(slot);
    }

    RunResult result;
    result.metrics = metrics_.finish(cfg_.slot_cap);
    result.payloads_verified = verify();
    result.source_rate = src_rate_;
    result.recoder_rate = rec_rate_;
    result.trace = trace_.take();
    return result;
  }

 private:
  void send(Slot slot, int link, NodeRole node, const CodedPacket& pkt, bool extra = false) {
    send_bytes(slot, link, node, encode_packet(pkt), pkt.header, extra);
  }

  void send_bytes(Slot slot, int link, NodeRole node, Bytes bytes, const CodingHeader& h,
                  bool extra = false) {
    metrics_.on_transmit(link);
    trace_.add(slot, TraceKind::kTransmit, node, link, h.window_opening, h.window_closing(),
               h.is_repair(), extra);
    if (cfg_.wire_tap) cfg_.wire_tap(link, slot, bytes);
    auto due = (link == 1 ? link1_ : link2_).send(slot);
    if (!due) {
      trace_.add(slot, TraceKind::kLost, node, link, h.window_opening, h.window_closing(),
                 h.is_repair());
      return;
    }
    sched_.schedule(*due, kDeliveryClass, WireDelivery{link, std::move(bytes)});
  }

  void relay_receive(Slot slot, Bytes bytes) {
    if (!recoder_) {
      const CodingHeader h = decode_header(bytes);
      trace_.add(slot, TraceKind::kForwarded, NodeRole::kRelay, 1, h.window_opening,
                 h.window_closing());
      fifo_.push_back(std::move(bytes));
      return;
    }
    const CodedPacket pkt = decode_packet(bytes, cfg_.payload_bytes);
    const auto outcome = recoder_->consume(pkt);
    trace_.add(slot, outcome == BufferOutcome::kStored ? TraceKind::kStored : TraceKind::kDiscarded,
               NodeRole::kRelay, 1, pkt.header.window_opening, pkt.header.window_closing(),
               pkt.header.is_repair());
  }

  void sink_receive(Slot slot, const Bytes& bytes) {
    const CodedPacket pkt = decode_packet(bytes, cfg_.payload_bytes);
    for (std::uint32_t index : decoder_.consume(pkt).newly_decoded) {
      metrics_.on_decoded();
      trace_.add(slot, TraceKind::kDecoded, NodeRole::kSink, 2, index);
    }
  }

  void sink_feedback(Slot slot) {
    const FeedbackPacket fb = decoder_.feedback();
    trace_.add(slot, TraceKind::kSinkState, NodeRole::kSink, 2, fb.fully_decoded,
               fb.partially_decoded);
    const Bytes image = encode_feedback(fb);
    sched_.schedule(slot + fd_, kFeedbackClass, FeedbackDelivery{NodeRole::kRelay, image});
    sched_.schedule(slot + 2 * fd_, kFeedbackClass, FeedbackDelivery{NodeRole::kSource, image});
  }

  void feedback_receive(Slot slot, const FeedbackDelivery& msg) {
    const FeedbackPacket fb = decode_feedback(msg.bytes);
    if (msg.to == NodeRole::kRelay) {
      if (!recoder_) return;  // a repeater keeps no coding state
      trace_.add(slot, TraceKind::kFeedback, NodeRole::kRelay, 2, fb.fully_decoded,
                 fb.partially_decoded);
      recoder_->apply_feedback(fb);
      return;
    }
    trace_.add(slot, TraceKind::kFeedback, NodeRole::kSource, 1, fb.fully_decoded,
               fb.partially_decoded);
    encoder_.apply_feedback(fb);
    if (fb.fully_decoded >= cfg_.packets) {
      trace_.add(slot, TraceKind::kAcknowledged, NodeRole::kSource, 1, cfg_.packets);
      metrics_.on_complete(slot);
      done_ = true;
    }
  }

  // Scheduled repair, else fresh data, else an extra repair while anything
  // is still unacknowledged.
  void source_transmit(Slot slot) {
    if (encoder_.repair_due() && encoder_.window_empty()) encoder_.skip_repairs();
    if (encoder_.repair_due()) {
      send(slot, 1, NodeRole::kSource, encoder_.emit(src_rng_));
      return;
    }
    if (encoder_.next_index() < cfg_.packets) {
      const std::uint32_t next = encoder_.next_index();
      if (encoder_.push(SourcePacket{next, payloads_[next]}) != PushResult::kRefused) {
        send(slot, 1, NodeRole::kSource, encoder_.emit(src_rng_));
        return;
      }
    }
    if (!encoder_.window_empty() && src_rate_.has_repairs())
      send(slot, 1, NodeRole::kSource, encoder_.emit_repair(src_rng_), true);
  }

  void relay_transmit(Slot slot) {
    if (!recoder_) {
      if (fifo_.empty()) return;
      Bytes bytes = std::move(fifo_.front());
      fifo_.pop_front();
      const CodingHeader h = decode_header(bytes);
      send_bytes(slot, 2, NodeRole::kRelay, std::move(bytes), h);
      return;
    }
    Recoder& r = *recoder_;
    if (r.repair_due() && r.window_empty()) r.skip_repairs();
    if (r.repair_due() || r.has_unwindowed_rows()) {
      send(slot, 2, NodeRole::kRelay, r.emit(rec_rng_));
    } else if (!r.window_empty() && rec_rate_.has_repairs()) {
      send(slot, 2, NodeRole::kRelay, r.emit_repair(rec_rng_), true);
    }
  }

  bool verify() const {
    for (std::uint32_t i = 0; i < cfg_.packets; ++i) {
      if (!decoder_.is_decoded(i)) {
        if (done_) return false;
        continue;
      }
      const auto got = decoder_.payload(i);
      if (!std::equal(got.begin(), got.end(), payloads_[i].begin(), payloads_[i].end()))
        return false;
    }
    return true;
  }

  const ScenarioConfig& cfg_;
  Slot fd_;
  std::vector<Bytes> payloads_;
  CodeRate src_rate_;
  CodeRate rec_rate_;
  Encoder encoder_;
  Decoder decoder_;
  std::optional<Recoder> recoder_;
  std::deque<Bytes> fifo_;
  ErasureChannel link1_;
  ErasureChannel link2_;
  Rng src_rng_;
  Rng rec_rng_;
  SlotScheduler<CodedMessage> sched_;
  MetricsCollector metrics_;
  Tracer trace_;
  bool done_ = false;
};

// ---------------------------------------------------------------------------
// Selective-repeat ARQ through a store-and-forward relay.

struct ArqData {
  std::uint32_t index = 0;
  Bytes payload;
  bool retransmission = false;
};

struct ArqFeedback {
  std::uint32_t cumulative = 0;              // every index below is received
  std::optional<std::uint32_t> highest;      // highest index received so far
  std::vector<std::uint32_t> missing;        // gaps below `highest`
  std::vector<std::uint32_t> nacks;          // gaps requested now
};

struct ArqDelivery {
  int link = 0;
  ArqData data;
};

using ArqMessage = std::variant<ArqDelivery, ArqFeedback>;

class ArqRun {
 public:
  explicit ArqRun(const ScenarioConfig& cfg)
      : cfg_(cfg),
        fd_(feedback_delay(cfg)),
        timeout_(2 * cfg.rtt + 2),
        payloads_(make_payloads(cfg)),
        link1_(make_channel(cfg, 1)),
        link2_(make_channel(cfg, 2)),
        acked_(cfg.packets, false),
        queued_(cfg.packets, false),
        last_sent_(cfg.packets, 0),
        received_(cfg.packets),
        last_nack_(cfg.packets, 0),
        trace_(cfg.record_trace) {}

  RunResult run() {
    for (Slot slot = 1; slot <= cfg_.slot_cap && !done_; ++slot) {
      bool sink_received = false;
      for (auto& ev : sched_.step()) {
        if (auto* d = std::get_if<ArqDelivery>(&ev.message)) {
          if (d->link == 1) {
            trace_.add(slot, TraceKind::kForwarded, NodeRole::kRelay, 1, d->data.index,
                       d->data.index, d->data.retransmission);
            fifo_.push_back(std::move(d->data));
          } else {
            sink_receive(slot, std::move(d->data));
            sink_received = true;
          }
        } else {
          feedback_receive(slot, std::get<ArqFeedback>(ev.message));
          if (done_) break;
        }
      }
      if (sink_received) sink_feedback(slot);
      if (done_) break;
      source_transmit(slot);
      relay_transmit(slot);
    }

    RunResult result;
    result.metrics = metrics_.finish(cfg_.slot_cap);
    result.payloads_verified = verify();
    result.source_rate = CodeRate{1, 1};
    result.recoder_rate = CodeRate{1, 1};
    result.trace = trace_.take();
    return result;
  }

 private:
  void send(Slot slot, int link, NodeRole node, ArqData data) {
    metrics_.on_transmit(link);
    trace_.add(slot, TraceKind::kTransmit, node, link, data.index, data.index,
               data.retransmission);
    if (cfg_.wire_tap) cfg_.wire_tap(link, slot, data.payload);
    auto due = (link == 1 ? link1_ : link2_).send(slot);
    if (!due) {
      trace_.add(slot, TraceKind::kLost, node, link, data.index, data.index, data.retransmission);
      return;
    }
    sched_.schedule(*due, kDeliveryClass, ArqDelivery{link, std::move(data)});
  }

  void sink_receive(Slot slot, ArqData data) {
    const std::uint32_t i = data.index;
    if (!received_[i].empty()) return;
    received_[i] = std::move(data.payload);
    ++sink_count_;
    metrics_.on_decoded();
    trace_.add(slot, TraceKind::kDecoded, NodeRole::kSink, 2, i);
    while (sink_cumulative_ < cfg_.packets && !received_[sink_cumulative_].empty())
      ++sink_cumulative_;
    if (!sink_highest_ || i > *sink_highest_) sink_highest_ = i;
  }

  void sink_feedback(Slot slot) {
    ArqFeedback fb;
    fb.cumulative = sink_cumulative_;
    fb.highest = sink_highest_;
    if (sink_highest_) {
      for (std::uint32_t i = sink_cumulative_; i < *sink_highest_; ++i) {
        if (!received_[i].empty()) continue;
        fb.missing.push_back(i);
        if (last_nack_[i] == 0 || slot - last_nack_[i] >= timeout_) {
          fb.nacks.push_back(i);
          last_nack_[i] = slot;
        }
      }
    }
    trace_.add(slot, TraceKind::kSinkState, NodeRole::kSink, 2, sink_cumulative_,
               sink_count_ - sink_cumulative_);
    sched_.schedule(slot + 2 * fd_, kFeedbackClass, std::move(fb));
  }

  void feedback_receive(Slot slot, const ArqFeedback& fb) {
    trace_.add(slot, TraceKind::kFeedback, NodeRole::kSource, 1, fb.cumulative,
               static_cast<std::uint32_t>(fb.nacks.size()));
    for (std::uint32_t i = oldest_unacked_; i < fb.cumulative; ++i) acked_[i] = true;
    if (fb.highest) {
      std::size_t m = 0;
      for (std::uint32_t i = fb.cumulative; i <= *fb.highest; ++i) {
        if (m < fb.missing.size() && fb.missing[m] == i) {
          ++m;
          continue;
        }
        acked_[i] = true;
      }
    }
    while (oldest_unacked_ < cfg_.packets && acked_[oldest_unacked_]) ++oldest_unacked_;
    for (std::uint32_t i : fb.nacks) {
      if (acked_[i] || queued_[i]) continue;
      queued_[i] = true;
      retransmit_.push_back(i);
    }
    if (oldest_unacked_ >= cfg_.packets) {
      trace_.add(slot, TraceKind::kAcknowledged, NodeRole::kSource, 1, cfg_.packets);
      metrics_.on_complete(slot);
      done_ = true;
    }
  }

  // NACKed packets first, then new packets, then a timed probe of the oldest
  // unacknowledged packet (covers losses no later arrival can reveal).
  void source_transmit(Slot slot) {
    while (!retransmit_.empty() && acked_[retransmit_.front()]) {
      queued_[retransmit_.front()] = false;
      retransmit_.pop_front();
    }
    std::optional<std::uint32_t> pick;
    bool again = true;
    if (!retransmit_.empty()) {
      pick = retransmit_.front();
      retransmit_.pop_front();
      queued_[*pick] = false;
    } else if (next_new_ < cfg_.packets) {
      pick = next_new_++;
      again = false;
    } else if (oldest_unacked_ < cfg_.packets && last_sent_[oldest_unacked_] + timeout_ <= slot) {
      pick = oldest_unacked_;
    }
    if (!pick) return;
    last_sent_[*pick] = slot;
    send(slot, 1, NodeRole::kSource, ArqData{*pick, payloads_[*pick], again});
  }

  void relay_transmit(Slot slot) {
    if (fifo_.empty()) return;
    ArqData data = std::move(fifo_.front());
    fifo_.pop_front();
    send(slot, 2, NodeRole::kRelay, std::move(data));
  }

  bool verify() const {
    for (std::uint32_t i = 0; i < cfg_.packets; ++i) {
      if (received_[i].empty()) {
        if (done_) return false;
        continue;
      }
      if (received_[i] != payloads_[i]) return false;
    }
    return true;
  }

  const ScenarioConfig& cfg_;
  Slot fd_;
  Slot timeout_;
  std::vector<Bytes> payloads_;
  ErasureChannel link1_;
  ErasureChannel link2_;

  // sender
  std::vector<bool> acked_;
  std::vector<bool> queued_;
  std::vector<Slot> last_sent_;
  std::deque<std::uint32_t> retransmit_;
  std::uint32_t next_new_ = 0;
  std::uint32_t oldest_unacked_ = 0;

  // relay
  std::deque<ArqData> fifo_;

  // receiver
  std::vector<Bytes> received_;
  std::vector<Slot> last_nack_;
  std::uint32_t sink_cumulative_ = 0;
  std::uint32_t sink_count_ = 0;
  std::optional<std::uint32_t> sink_highest_;

  SlotScheduler<ArqMessage> sched_;
  MetricsCollector metrics_;
  Tracer trace_;
  bool done_ = false;
};

void check_rate(const std::optional<CodeRate>& rate, const char* name) {
  if (rate && (rate->k < 1 || rate->k > rate->n || rate->n > 255))
    throw std::invalid_argument(std::string(name) + " code rate must satisfy 1 <= k <= n <= 255");
}

}  // namespace

void validate(const ScenarioConfig& c) {
  auto prob = [](double e, const char* name) {
    if (!(e >= 0.0 && e < 1.0))
      throw std::invalid_argument(std::string(name) + " must be in [0, 1)");
  };
  prob(c.eps1, "eps1");
  prob(c.eps2, "eps2");
  if (c.forward_delay < 1) throw std::invalid_argument("forward delay must be at least 1 slot");
  if (c.rtt <= c.forward_delay)
    throw std::invalid_argument("rtt must exceed the forward delay (feedback takes >= 1 slot)");
  if (c.packets < 1 || c.packets > 0xFFFF)
    throw std::invalid_argument("packets must be in 1..65535");
  if (c.payload_bytes < 1) throw std::invalid_argument("payload_bytes must be positive");
  if (c.max_window < 1 || c.max_window > 255)
    throw std::invalid_argument("max_window must be in 1..255 (1-byte header field)");
  if (c.slot_cap < 1) throw std::invalid_argument("slot_cap must be positive");
  if (!std::isfinite(c.gamma)) throw std::invalid_argument("gamma must be finite");
  check_rate(c.rate_source, "source");
  check_rate(c.rate_recoder, "recoder");
}

Slot feedback_delay(const ScenarioConfig& config) { return config.rtt - config.forward_delay; }

CodeRate effective_source_rate(const ScenarioConfig& c) {
  if (c.scenario == Scenario::kSrArq) return CodeRate{1, 1};
  if (c.rate_source) return *c.rate_source;
  const double loss = c.scenario == Scenario::kSwncRecoder ? c.eps1 : combined_loss(c.eps1, c.eps2);
  return select_code_rate(loss, c.gamma);
}

CodeRate effective_recoder_rate(const ScenarioConfig& c) {
  if (c.scenario != Scenario::kSwncRecoder) return CodeRate{1, 1};
  if (c.rate_recoder) return *c.rate_recoder;
  return select_code_rate(c.eps2, c.gamma);
}

RunResult run_scenario(const ScenarioConfig& config) {
  validate(config);
  if (config.scenario == Scenario::kSrArq) return ArqRun(config).run();
  return CodedRun(config).run();
}

ScenarioConfig golden_trace_config() {
  ScenarioConfig c;
  c.scenario = Scenario::kSwncRecoder;
  c.eps1 = 0.0;
  c.eps2 = 0.0;
  c.rtt = 4;
  c.forward_delay = 1;
  c.packets = 8;
  c.payload_bytes = 100;
  c.rate_source = CodeRate{4, 5};
  c.rate_recoder = CodeRate{3, 4};
  c.losses_link1 = ScriptedLosses{8};
  c.losses_link2 = ScriptedLosses{4};
  c.slot_cap = 60;
  c.seed = 1;
  c.record_trace = true;
  return c;
}

}  // namespace swnc
