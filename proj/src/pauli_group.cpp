#include "mirrorchain/pauli_group.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

PauliGroup::PauliGroup(int n_sites) : n_(n_sites) {
  elements_.emplace_back(n_sites);
}

std::uint64_t PauliGroup::pack(const PauliString& p) {
  return (p.x_mask() << 32) | p.z_mask();
}

PauliString PauliGroup::unpack(std::uint64_t v) const {
  return PauliString::from_masks(n_, v >> 32, v & 0xffffffffULL);
}

std::uint64_t PauliGroup::reduce(std::uint64_t v) const {
  for (const auto b : basis_) {
    const std::uint64_t pivot = std::uint64_t{1} << (63 - std::countl_zero(b));
    if (v & pivot) v ^= b;
  }
  return v;
}

bool PauliGroup::contains(const PauliString& p) const {
  if (p.n_sites() != n_) return false;
  return reduce(pack(p)) == 0;
}

bool PauliGroup::add(const PauliString& p) {
  if (p.n_sites() != n_) {
    throw DimensionError("generator on " + std::to_string(p.n_sites()) +
                         " sites added to a group on " + std::to_string(n_));
  }
  const std::uint64_t v = reduce(pack(p));
  if (v == 0) return false;
  const std::uint64_t pivot = std::uint64_t{1} << (63 - std::countl_zero(v));
  for (auto& b : basis_) {
    if (b & pivot) b ^= v;
  }
  basis_.push_back(v);
  std::sort(basis_.begin(), basis_.end(), std::greater<>());
  rebuild_elements();
  return true;
}

void PauliGroup::rebuild_elements() {
  const std::size_t count = std::size_t{1} << basis_.size();
  std::vector<std::uint64_t> packed(count, 0);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const std::size_t half = std::size_t{1} << k;
    for (std::size_t j = 0; j < half; ++j) packed[half + j] = packed[j] ^ basis_[k];
  }
  elements_.clear();
  elements_.reserve(count);
  for (const auto v : packed) elements_.push_back(unpack(v));
  std::sort(elements_.begin(), elements_.end(), CanonicalLess{});
}

std::vector<PauliString> PauliGroup::generators() const {
  std::vector<PauliString> out;
  out.reserve(basis_.size());
  for (const auto v : basis_) out.push_back(unpack(v));
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

bool PauliGroup::is_subgroup_of(const PauliGroup& other) const {
  if (other.n_ != n_) return false;
  return std::all_of(basis_.begin(), basis_.end(),
                     [&](std::uint64_t v) { return other.contains(unpack(v)); });
}

SubgroupChain::SubgroupChain(std::vector<PauliGroup> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw PreconditionError("subgroup chain is empty");
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (!levels_[i].is_subgroup_of(levels_[i - 1]) ||
        levels_[i].size() >= levels_[i - 1].size()) {
      throw PreconditionError("chain level " + std::to_string(i) +
                              " is not a strict subgroup of its predecessor");
    }
  }
  if (!levels_.back().is_trivial()) {
    throw PreconditionError("subgroup chain must end at the identity group");
  }
}

PauliGroup group_closure(int n_sites, std::span<const PauliString> seed) {
  PauliGroup group(n_sites);
  for (const auto& p : seed) group.add(p);
  return group;
}

double support_tolerance(int n_sites) {
  return 1e-10 * static_cast<double>(std::uint64_t{1} << n_sites);
}

std::vector<std::pair<PauliString, complex>> pauli_coefficients(const Matrix& u,
                                                                double threshold) {
  if (u.rows() != u.cols()) throw DimensionError("operator is not square");
  const int n = sites_for_dimension(u.rows());
  require_dense_size(n);
  const std::size_t dim = std::size_t{1} << n;
  static constexpr complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

  std::vector<std::pair<PauliString, complex>> out;
  std::vector<complex> v(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::size_t c = 0; c < dim; ++c) {
      v[c] = u(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ x));
    }
    // In-place Walsh-Hadamard: v[z] <- sum_c (-1)^{popcount(z & c)} v[c]
    for (std::size_t len = 1; len < dim; len <<= 1) {
      for (std::size_t i = 0; i < dim; i += len << 1) {
        for (std::size_t j = i; j < i + len; ++j) {
          const complex a = v[j];
          const complex b = v[j + len];
          v[j] = a + b;
          v[j + len] = a - b;
        }
      }
    }
    for (std::uint64_t z = 0; z < dim; ++z) {
      const complex tr = kPowers[std::popcount(x & z) & 3] * v[z];
      if (std::abs(tr) > threshold) {
        out.emplace_back(PauliString::from_masks(n, x, z), tr / static_cast<double>(dim));
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return CanonicalLess{}(a.first, b.first); });
  return out;
}

PauliGroup support_group(const Matrix& u) {
  require_unitary(u);
  const int n = sites_for_dimension(u.rows());
  PauliGroup group(n);
  for (const auto& [word, coeff] : pauli_coefficients(u, support_tolerance(n))) {
    group.add(word);
  }
  return group;
}

namespace {

struct SubgroupSearch {
  const std::vector<PauliString>& candidates;
  std::span<const PauliString> exclude;
  std::span<const PauliString> keep;
  int n_sites;
  int target_dim;

  bool admissible(const PauliGroup& g) const {
    return std::none_of(exclude.begin(), exclude.end(),
                        [&](const PauliString& e) { return g.contains(e); });
  }

  bool complete(const PauliGroup& g) const {
    return std::all_of(keep.begin(), keep.end(),
                       [&](const PauliString& k) { return g.contains(k); });
  }

  // Depth-first in canonical order over independent generators.
  bool run(std::size_t start, PauliGroup& current, PauliGroup& found) const {
    if (current.dimension() == target_dim) {
      if (!complete(current)) return false;
      found = current;
      return true;
    }
    const auto needed = static_cast<std::size_t>(target_dim - current.dimension());
    for (std::size_t i = start; i + needed <= candidates.size(); ++i) {
      if (current.contains(candidates[i])) continue;
      PauliGroup next = current;
      next.add(candidates[i]);
      if (!admissible(next)) continue;
      if (run(i + 1, next, found)) return true;
    }
    return false;
  }
};

}  // namespace

PauliGroup maximal_subgroup(const PauliGroup& group, std::span<const PauliString> exclude,
                            std::span<const PauliString> keep) {
  if (group.is_trivial()) {
    throw PreconditionError("the identity group has no proper subgroup");
  }
  for (const auto& k : keep) {
    if (!group.contains(k)) throw PreconditionError("keep word " + k.str() + " is not in the group");
  }
  PauliGroup identity(group.n_sites());
  if (!std::all_of(exclude.begin(), exclude.end(),
                   [&](const PauliString& e) { return !identity.contains(e); })) {
    throw PreconditionError("the identity cannot be excluded from a subgroup");
  }

  std::vector<PauliString> candidates;
  for (const auto& e : group.elements()) {
    if (!e.is_identity()) candidates.push_back(e);
  }
  for (int dim = group.dimension() - 1; dim >= 0; --dim) {
    SubgroupSearch search{candidates, exclude, keep, group.n_sites(), dim};
    PauliGroup current(group.n_sites());
    PauliGroup found(group.n_sites());
    if (search.run(0, current, found)) return found;
  }
  throw PreconditionError("no proper subgroup satisfies the exclude/keep constraints");
}

std::vector<PauliGroup> index_two_subgroups(const PauliGroup& group) {
  const int d = group.dimension();
  if (d == 0) throw PreconditionError("the identity group has no proper subgroup");
  if (d > 20) throw ResourceError("too many index-two subgroups to enumerate");
  const auto gens = group.generators();
  std::vector<PauliGroup> out;
  out.reserve((std::size_t{1} << d) - 1);
  for (std::uint32_t f = 1; f < (std::uint32_t{1} << d); ++f) {
    // Kernel basis: generators outside the functional's support, plus the
    // first supported generator times each later supported one.
    PauliGroup child(group.n_sites());
    int pivot = -1;
    for (int i = 0; i < d; ++i) {
      if ((f >> i & 1U) == 0) {
        child.add(gens[static_cast<std::size_t>(i)]);
      } else if (pivot < 0) {
        pivot = i;
      } else {
        child.add(pauli_mul(gens[static_cast<std::size_t>(pivot)], gens[static_cast<std::size_t>(i)]).word);
      }
    }
    out.push_back(std::move(child));
  }
  return out;
}

SubgroupChain build_subgroup_chain(const PauliGroup& top, std::span<const PauliString> keep) {
  std::vector<PauliGroup> levels{top};
  std::vector<PauliString> retained;
  for (const auto& k : keep) {
    if (top.contains(k) && !k.is_identity()) retained.push_back(k);
  }
  while (!levels.back().is_trivial()) {
    const PauliGroup& current = levels.back();
    if (!retained.empty() &&
        group_closure(current.n_sites(), retained).size() == current.size()) {
      retained.clear();
    }
    levels.push_back(maximal_subgroup(current, {}, retained));
  }
  return SubgroupChain(std::move(levels));
}

}  // namespace mirrorchain
