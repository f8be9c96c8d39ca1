#include "mirrorchain/sampling.hpp"

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

std::uint64_t Sampler::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("empty sampling range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % bound;
}

PauliString Sampler::pauli_word(int n_sites) {
  const std::uint64_t mask = (std::uint64_t{1} << n_sites) - 1;
  for (;;) {
    const std::uint64_t x = engine_() & mask;
    const std::uint64_t z = engine_() & mask;
    if ((x | z) != 0) return PauliString::from_masks(n_sites, x, z);
  }
}

ProductDecomposition Sampler::pauli_product(int n_sites, int count) {
  ProductDecomposition d;
  d.n_sites = n_sites;
  for (int k = 0; k < count; ++k) {
    PauliString w = pauli_word(n_sites);
    d.factors.push_back({w, uniform(-kPi, kPi)});
  }
  return d;
}

}  // namespace mirrorchain
