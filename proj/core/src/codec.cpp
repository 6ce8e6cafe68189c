#include "swnc/codec.hpp"

#include <algorithm>
#include <charconv>

namespace swnc {

using gf256::FieldElement;

std::string CodeRate::to_string() const { return std::to_string(k) + "/" + std::to_string(n); }

CodeRate CodeRate::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos)
    throw std::invalid_argument("code rate must look like k/n: " + std::string(text));
  CodeRate r;
  const auto kpart = text.substr(0, slash);
  const auto npart = text.substr(slash + 1);
  const auto [kp, kec] = std::from_chars(kpart.data(), kpart.data() + kpart.size(), r.k);
  const auto [np, nec] = std::from_chars(npart.data(), npart.data() + npart.size(), r.n);
  if (kec != std::errc{} || nec != std::errc{} || kp != kpart.data() + kpart.size() ||
      np != npart.data() + npart.size())
    throw std::invalid_argument("code rate must look like k/n: " + std::string(text));
  if (r.k < 1 || r.k > r.n)
    throw std::invalid_argument("code rate needs 1 <= k <= n: " + std::string(text));
  return r;
}

CodeRate select_code_rate(double target, std::uint32_t max_n) {
  CodeRate best{1, max_n};
  double best_value = 0.0;
  constexpr double kSlack = 1e-12;
  for (std::uint32_t n = 1; n <= max_n; ++n) {
    for (std::uint32_t k = n; k >= 1; --k) {
      const double v = static_cast<double>(k) / n;
      if (v <= target + kSlack) {
        if (v > best_value + kSlack) {
          best = CodeRate{k, n};
          best_value = v;
        }
        break;
      }
    }
  }
  return best;
}

CodeRate select_code_rate(double epsilon, double gamma, std::uint32_t max_n) {
  return select_code_rate((1.0 - epsilon) - gamma, max_n);
}

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(EncoderConfig config) : config_(config), schedule_(config.rate) {
  if (config_.max_window < 1 || config_.max_window > 255)
    throw CodecError("max_window must be in 1..255");
  if (config_.rate.k < 1 || config_.rate.k > config_.rate.n)
    throw CodecError("invalid code rate " + config_.rate.to_string());
}

PushResult Encoder::push(SourcePacket packet) {
  if (packet.index != next_index_)
    throw CodecError("expected source packet " + std::to_string(next_index_) + ", got " +
                     std::to_string(packet.index));
  if (packet.payload.size() != config_.payload_bytes)
    throw CodecError("source payload must be " + std::to_string(config_.payload_bytes) +
                     " bytes");
  PushResult result = PushResult::kAccepted;
  if (window_full()) {
    if (config_.overflow == OverflowPolicy::kHoldAndRepair) return PushResult::kRefused;
    window_.pop_front();
    result = PushResult::kDroppedOldest;
  }
  window_.push_back(std::move(packet));
  ++next_index_;
  fresh_ = true;
  return result;
}

std::uint32_t Encoder::window_opening() const {
  return window_.empty() ? next_index_ : window_.front().index;
}

CodedPacket Encoder::combine(Rng& rng, bool repair) {
  if (window_.empty()) throw CodecError("cannot emit from an empty window");
  CodedPacket out;
  out.header.window_opening = window_.front().index;
  out.header.window_size = static_cast<std::uint32_t>(window_.size());
  out.header.coefficient_count = static_cast<std::uint32_t>(config_.max_window);
  out.header.source_fec = repair;
  out.header.last_fec = repair;
  out.coefficients.assign(config_.max_window, 0);
  out.payload.assign(config_.payload_bytes, 0);
  for (std::size_t i = 0; i < window_.size(); ++i) {
    const bool newest = i + 1 == window_.size();
    const FieldElement c = (newest && !repair) ? rng.nonzero_coefficient() : rng.coefficient();
    out.coefficients[i] = c.value();
    gf256::mul_add_region(out.payload, window_[i].payload, c);
  }
  return out;
}

CodedPacket Encoder::emit(Rng& rng) {
  const bool repair = schedule_.repair_due();
  CodedPacket out = combine(rng, repair);
  if (!repair) fresh_ = false;
  schedule_.advance();
  return out;
}

CodedPacket Encoder::emit_repair(Rng& rng) { return combine(rng, true); }

void Encoder::apply_feedback(const FeedbackPacket& feedback) {
  while (!window_.empty() && window_.front().index < feedback.fully_decoded) window_.pop_front();
}

// ---------------------------------------------------------------------------
// Decoder

namespace {

void trim_trailing_zeros(Bytes& coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
}

}  // namespace

Decoder::Decoder(std::size_t payload_bytes) : payload_bytes_(payload_bytes) {}

std::span<const std::uint8_t> Decoder::payload(std::uint32_t index) const {
  if (!is_decoded(index)) throw CodecError("packet " + std::to_string(index) + " not decoded");
  return payloads_[index];
}

void Decoder::mark_decoded(std::uint32_t index, Bytes payload, std::vector<std::uint32_t>& out) {
  if (decoded_.size() <= index) {
    decoded_.resize(index + 1, false);
    payloads_.resize(index + 1);
  }
  decoded_[index] = true;
  payloads_[index] = std::move(payload);
  ++decoded_count_;
  out.push_back(index);
  while (is_decoded(fully_decoded_)) ++fully_decoded_;
}

ConsumeOutcome Decoder::consume(const CodedPacket& packet) {
  try {
    validate(packet);
  } catch (const WireError& e) {
    throw CodecError(std::string("malformed packet: ") + e.what());
  }
  if (packet.payload.size() != payload_bytes_)
    throw CodecError("payload length does not match the flow");

  Row row;
  row.pivot = packet.header.window_opening;
  row.coeffs.assign(packet.coefficients.begin(),
                    packet.coefficients.begin() + packet.header.window_size);
  row.payload = packet.payload;

  // Forward pass: strip decoded columns and pending pivots, left to right.
  for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
    const FieldElement c(row.coeffs[i]);
    if (c.is_zero()) continue;
    const std::uint32_t col = row.pivot + static_cast<std::uint32_t>(i);
    if (is_decoded(col)) {
      gf256::mul_add_region(row.payload, payloads_[col], c);
      row.coeffs[i] = 0;
    } else if (auto it = pending_.find(col); it != pending_.end()) {
      const Row& p = it->second;
      if (row.coeffs.size() < i + p.coeffs.size()) row.coeffs.resize(i + p.coeffs.size(), 0);
      gf256::mul_add_region(std::span(row.coeffs).subspan(i), p.coeffs, c);
      gf256::mul_add_region(row.payload, p.payload, c);
    }
  }

  const auto first = std::find_if(row.coeffs.begin(), row.coeffs.end(),
                                  [](std::uint8_t c) { return c != 0; });
  if (first == row.coeffs.end()) return ConsumeOutcome{ConsumeStatus::kRedundant, {}};

  const auto lead = static_cast<std::uint32_t>(first - row.coeffs.begin());
  row.coeffs.erase(row.coeffs.begin(), first);
  row.pivot += lead;
  trim_trailing_zeros(row.coeffs);
  const FieldElement norm = gf256::inv(FieldElement(row.coeffs.front()));
  gf256::scale_region(row.coeffs, norm);
  gf256::scale_region(row.payload, norm);

  // Back-substitute the new pivot out of earlier rows.
  for (auto& [pivot, other] : pending_) {
    if (pivot > row.pivot) break;
    const std::size_t at = row.pivot - pivot;
    if (at >= other.coeffs.size() || other.coeffs[at] == 0) continue;
    const FieldElement c(other.coeffs[at]);
    if (other.coeffs.size() < at + row.coeffs.size()) other.coeffs.resize(at + row.coeffs.size(), 0);
    gf256::mul_add_region(std::span(other.coeffs).subspan(at), row.coeffs, c);
    gf256::mul_add_region(other.payload, row.payload, c);
    trim_trailing_zeros(other.coeffs);
  }
  pending_.emplace(row.pivot, std::move(row));

  // A row reduced to its pivot alone is a recovered source packet. Other rows
  // are already zero on that column, so removing it needs no further work.
  ConsumeOutcome outcome{ConsumeStatus::kInnovative, {}};
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->second.coeffs.size() == 1) {
      mark_decoded(it->first, std::move(it->second.payload), outcome.newly_decoded);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(outcome.newly_decoded.begin(), outcome.newly_decoded.end());
  return outcome;
}

}  // namespace swnc
