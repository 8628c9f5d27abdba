// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "oed/types.hpp"

namespace oed::rng {

/// SplitMix64 finalizer; used to derive well-mixed seeds.
constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** generator. Self-contained so that streams are bit-reproducible
/// independent of the standard library implementation.
class Engine {
public:
  explicit Engine(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = mix(x++);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in (0, 1]; never returns 0 so log() is safe.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (explicit so draws are reproducible).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// +1 or -1 with probability 1/2 each.
  double next_rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Labeled substream seed: all randomness in a run flows from one root seed
/// through (label, index) substreams, so parallel work is schedule-independent.
inline std::uint64_t substream(std::uint64_t root, std::string_view label,
                               std::uint64_t index = 0) {
  std::uint64_t h = mix(root);
  for (unsigned char c : label) h = mix(h ^ c);
  return mix(h ^ index);
}

inline Vector standard_normal(Index n, Engine& engine) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = engine.next_normal();
  return v;
}

inline Vector rademacher(Index n, Engine& engine) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = engine.next_rademacher();
  return v;
}

}  // namespace oed::rng
