#include "swnc/recoder.hpp"

#include <algorithm>
#include <cassert>
#include <optional>

namespace swnc {

using gf256::FieldElement;

Recoder::Recoder(RecoderConfig config) : config_(config), schedule_(config.rate) {
  if (config_.coefficient_count < 1 || config_.coefficient_count > 255)
    throw CodecError("coefficient_count must be in 1..255");
  if (config_.max_buffer < 1) throw CodecError("max_buffer must be positive");
  if (config_.rate.k < 1 || config_.rate.k > config_.rate.n)
    throw CodecError("invalid code rate " + config_.rate.to_string());
}

Recoder::BasisRow Recoder::reduce(std::uint32_t offset, const Bytes& coeffs) const {
  BasisRow out;
  const std::uint32_t end = offset + static_cast<std::uint32_t>(coeffs.size());
  const std::uint32_t start = std::max(offset, horizon_);
  if (start >= end) return out;

  Bytes v(coeffs.begin() + (start - offset), coeffs.end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    const auto it = basis_.find(start + static_cast<std::uint32_t>(i));
    if (it == basis_.end()) continue;
    const Bytes& b = it->second.coeffs;
    if (v.size() < i + b.size()) v.resize(i + b.size(), 0);
    gf256::mul_add_region(std::span(v).subspan(i), b, FieldElement(v[i]));
  }

  const auto first = std::find_if(v.begin(), v.end(), [](std::uint8_t c) { return c != 0; });
  if (first == v.end()) return out;
  out.pivot = start + static_cast<std::uint32_t>(first - v.begin());
  v.erase(v.begin(), first);
  while (v.back() == 0) v.pop_back();
  gf256::scale_region(v, gf256::inv(FieldElement(v.front())));
  out.coeffs = std::move(v);
  return out;
}

void Recoder::rebuild_basis() {
  basis_.clear();
  std::erase_if(rows_, [this](const StoredRow& row) {
    BasisRow b = reduce(row.opening, row.coeffs);
    if (b.coeffs.empty()) return true;
    basis_.emplace(b.pivot, std::move(b));
    return false;
  });
}

BufferOutcome Recoder::consume(const CodedPacket& packet) {
  try {
    validate(packet);
  } catch (const WireError& e) {
    throw CodecError(std::string("malformed packet: ") + e.what());
  }
  if (packet.header.coefficient_count != config_.coefficient_count)
    throw CodecError("coefficient_count does not match the flow");
  if (packet.payload.size() != config_.payload_bytes)
    throw CodecError("payload length does not match the flow");

  StoredRow row;
  row.opening = packet.header.window_opening;
  row.closing = packet.header.window_closing();
  row.coeffs.assign(packet.coefficients.begin(),
                    packet.coefficients.begin() + packet.header.window_size);
  row.payload = packet.payload;

  BasisRow residual = reduce(row.opening, row.coeffs);
  if (residual.coeffs.empty()) return BufferOutcome::kDiscarded;

  if (rows_.size() >= config_.max_buffer) {
    if (config_.overflow == OverflowPolicy::kHoldAndRepair) return BufferOutcome::kDiscarded;
    rows_.erase(rows_.begin());
    rebuild_basis();
    residual = reduce(row.opening, row.coeffs);
    if (residual.coeffs.empty()) return BufferOutcome::kDiscarded;
  }

  basis_.emplace(residual.pivot, std::move(residual));
  row.arrival = arrivals_++;
  const auto pos = std::upper_bound(
      rows_.begin(), rows_.end(), row, [](const StoredRow& a, const StoredRow& b) {
        return a.opening != b.opening ? a.opening < b.opening : a.arrival < b.arrival;
      });
  rows_.insert(pos, std::move(row));
  return BufferOutcome::kStored;
}

bool Recoder::has_unwindowed_rows() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const StoredRow& r) { return !r.windowed; });
}

bool Recoder::window_empty() const { return window_size() == 0; }

std::size_t Recoder::window_size() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const StoredRow& r) { return r.windowed; }));
}

std::uint64_t Recoder::window_next_row() {
  auto it = std::find_if(rows_.begin(), rows_.end(), [](const StoredRow& r) { return !r.windowed; });
  if (it == rows_.end()) throw CodecError("recoder has no buffered row to add");
  it->windowed = true;
  const std::uint64_t id = it->arrival;
  fit_window_span();
  return id;
}

// The outgoing coefficient vector must fit the flow-wide coefficient_count;
// evict the oldest windowed rows until it does.
void Recoder::fit_window_span() {
  for (;;) {
    std::optional<std::uint32_t> lo, hi;
    for (const auto& r : rows_) {
      if (!r.windowed) continue;
      lo = lo ? std::min(*lo, r.opening) : r.opening;
      hi = hi ? std::max(*hi, r.closing) : r.closing;
    }
    if (!lo || *hi - *lo + 1 <= config_.coefficient_count) return;
    auto oldest = std::find_if(rows_.begin(), rows_.end(), [](const StoredRow& r) { return r.windowed; });
    rows_.erase(oldest);
    rebuild_basis();
  }
}

CodedPacket Recoder::combine(Rng& rng, bool repair, std::optional<std::uint64_t> newest) {
  std::optional<std::uint32_t> lo, hi;
  for (const auto& r : rows_) {
    if (!r.windowed) continue;
    lo = lo ? std::min(*lo, r.opening) : r.opening;
    hi = hi ? std::max(*hi, r.closing) : r.closing;
  }
  if (!lo) throw CodecError("cannot emit from an empty recoding window");
  assert(*hi - *lo + 1 <= config_.coefficient_count);

  CodedPacket out;
  out.header.window_opening = *lo;
  out.header.window_size = *hi - *lo + 1;
  out.header.coefficient_count = static_cast<std::uint32_t>(config_.coefficient_count);
  out.header.source_fec = false;
  out.header.last_fec = repair;
  out.coefficients.assign(config_.coefficient_count, 0);
  out.payload.assign(config_.payload_bytes, 0);
  for (const auto& r : rows_) {
    if (!r.windowed) continue;
    const bool forced = newest && r.arrival == *newest;
    const FieldElement c = forced ? rng.nonzero_coefficient() : rng.coefficient();
    gf256::mul_add_region(std::span(out.coefficients).subspan(r.opening - *lo), r.coeffs, c);
    gf256::mul_add_region(out.payload, r.payload, c);
  }
  return out;
}

CodedPacket Recoder::emit(Rng& rng) {
  const bool repair = schedule_.repair_due();
  std::optional<std::uint64_t> added;
  if (!repair) added = window_next_row();
  CodedPacket out = combine(rng, repair, added);
  schedule_.advance();
  return out;
}

CodedPacket Recoder::emit_repair(Rng& rng) { return combine(rng, true, std::nullopt); }

void Recoder::apply_feedback(const FeedbackPacket& feedback) {
  if (feedback.fully_decoded <= horizon_) return;
  horizon_ = feedback.fully_decoded;
  std::erase_if(rows_, [this](const StoredRow& r) { return r.closing < horizon_; });
  rebuild_basis();
}

}  // namespace swnc
