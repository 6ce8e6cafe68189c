#include "swnc/gf256.hpp"

#include <cassert>

namespace swnc::gf256 {

namespace detail {

const std::array<std::array<std::uint8_t, 256>, 256>& mul_table() {
  static const auto table = [] {
    std::array<std::array<std::uint8_t, 256>, 256> t{};
    for (unsigned a = 0; a < 256; ++a) {
      for (unsigned b = 0; b < 256; ++b) {
        t[a][b] = mul(FieldElement(static_cast<std::uint8_t>(a)),
                      FieldElement(static_cast<std::uint8_t>(b)))
                      .value();
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail

FieldElement inv(FieldElement a) {
  if (a.is_zero()) throw NonInvertibleError();
  const auto& t = detail::kTables;
  return FieldElement(t.exp[255 - t.log[a.value()]]);
}

FieldElement div(FieldElement a, FieldElement b) { return mul(a, inv(b)); }

void mul_add_region(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
                    FieldElement coefficient) {
  assert(dst.size() >= src.size());
  if (coefficient.is_zero()) return;
  if (coefficient.value() == 1) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] ^= src[i];
    return;
  }
  const auto& row = detail::mul_table()[coefficient.value()];
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] ^= row[src[i]];
}

void scale_region(std::span<std::uint8_t> data, FieldElement coefficient) {
  if (coefficient.value() == 1) return;
  const auto& row = detail::mul_table()[coefficient.value()];
  for (auto& byte : data) byte = row[byte];
}

}  // namespace swnc::gf256
