// SPDX-License-Identifier: Apache-2.0
//
// Deterministic seeding and random draws for the mixce workbench.
//
// Every random quantity in the project is produced by an Rng constructed
// from a seed derived with derive_seed(base, label, index). The derivation
// is a fixed, documented hash (FNV-1a over the base seed bytes, the label
// bytes and the index bytes, finished with the splitmix64 mixer), so seeds
// for one purpose never collide with or shift seeds for another purpose.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mixce {

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 finalizer; bijective avalanche mixer on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Seed for (base seed, purpose label, index). Stable under insertion of
// new labels or indices elsewhere.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::uint64_t index = 0);

// Seeded random source with a fixed, platform-independent mapping from the
// raw 64-bit engine output to doubles. The std::* distribution classes are
// implementation-defined and therefore not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double gaussian();

  // Circularly-symmetric complex Gaussian CN(0, variance).
  std::complex<double> complex_gaussian(double variance);

  // Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // In-place Fisher-Yates shuffle using below(); deterministic per seed.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mixce
