#pragma once

#include <cstdint>
#include <random>

#include "swnc/gf256.hpp"

namespace swnc {

// Seeded generator with platform-independent draws. std distributions are
// implementation-defined, so values are taken straight from the engine bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (seed, stream id) via splitmix64.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

  gf256::FieldElement coefficient() { return gf256::FieldElement(next_byte()); }

  gf256::FieldElement nonzero_coefficient() {
    std::uint8_t v = 0;
    while (v == 0) v = next_byte();
    return gf256::FieldElement(v);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [lo, hi]; small modulo bias is irrelevant for test inputs.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return lo + engine_() % (hi - lo + 1);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace swnc
