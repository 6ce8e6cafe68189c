#pragma once

// Arithmetic over GF(2^8) with the reduction polynomial x^8+x^4+x^3+x^2+1 (0x11D).
//
// Scalar operations work on FieldElement; the region helpers operate on raw
// byte spans so coefficient vectors and payloads can share one code path.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace swnc::gf256 {

inline constexpr std::uint16_t kPolynomial = 0x11D;

class FieldElement {
 public:
  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint8_t value) : value_(value) {}

  constexpr std::uint8_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  friend constexpr bool operator==(FieldElement, FieldElement) = default;

 private:
  std::uint8_t value_ = 0;
};

/// Thrown by inv() when asked to invert zero.
class NonInvertibleError : public std::domain_error {
 public:
  NonInvertibleError() : std::domain_error("gf256: zero has no multiplicative inverse") {}
};

namespace detail {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t;
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  // Doubled so exp[log a + log b] never needs a modulo.
  for (unsigned i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = make_tables();

// 256 x 256 product table, row-major by the first operand.
const std::array<std::array<std::uint8_t, 256>, 256>& mul_table();

}  // namespace detail

constexpr FieldElement add(FieldElement a, FieldElement b) {
  return FieldElement(static_cast<std::uint8_t>(a.value() ^ b.value()));
}

// Subtraction is addition in characteristic 2.
constexpr FieldElement sub(FieldElement a, FieldElement b) { return add(a, b); }

constexpr FieldElement mul(FieldElement a, FieldElement b) {
  if (a.is_zero() || b.is_zero()) return FieldElement{};
  const auto& t = detail::kTables;
  return FieldElement(t.exp[t.log[a.value()] + t.log[b.value()]]);
}

FieldElement inv(FieldElement a);

FieldElement div(FieldElement a, FieldElement b);

constexpr FieldElement operator+(FieldElement a, FieldElement b) { return add(a, b); }
constexpr FieldElement operator*(FieldElement a, FieldElement b) { return mul(a, b); }

// dst[i] ^= coefficient * src[i]; requires dst.size() >= src.size().
void mul_add_region(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
                    FieldElement coefficient);

// data[i] = coefficient * data[i]
void scale_region(std::span<std::uint8_t> data, FieldElement coefficient);

}  // namespace swnc::gf256
