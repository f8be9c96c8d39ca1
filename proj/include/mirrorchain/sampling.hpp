#pragma once

#include <cstdint>
#include <random>

#include "mirrorchain/decomposition.hpp"
#include "mirrorchain/pauli.hpp"

namespace mirrorchain {

/// Seeded generator with a platform-independent uniform double, so seeded
/// runs give identical bytes across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Random non-identity Pauli word.
  PauliString pauli_word(int n_sites);

  /// Product of `count` factors with random words and angles in (-pi, pi].
  ProductDecomposition pauli_product(int n_sites, int count);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mirrorchain
