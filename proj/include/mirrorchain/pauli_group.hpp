#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mirrorchain/linalg.hpp"
#include "mirrorchain/pauli.hpp"

namespace mirrorchain {

/// Phase-free multiplicative group of Pauli words.
///
/// Phase-free multiplication is XOR on the (x, z) masks, so every such group
/// is an F2 vector space; it is held as a reduced XOR basis plus the sorted
/// element list. Elements are kept in canonical order.
class PauliGroup {
 public:
  /// The trivial group {I...I}.
  explicit PauliGroup(int n_sites);

  int n_sites() const { return n_; }
  std::size_t size() const { return elements_.size(); }
  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<PauliString>& elements() const { return elements_; }

  /// Independent generators in canonical order (reduced basis vectors).
  std::vector<PauliString> generators() const;

  bool contains(const PauliString& p) const;
  bool is_subgroup_of(const PauliGroup& other) const;
  bool is_trivial() const { return basis_.empty(); }

  /// Adds a generator; returns false when p was already in the group.
  bool add(const PauliString& p);

  friend bool operator==(const PauliGroup& a, const PauliGroup& b) {
    return a.n_ == b.n_ && a.elements_ == b.elements_;
  }

 private:
  static std::uint64_t pack(const PauliString& p);
  PauliString unpack(std::uint64_t v) const;
  std::uint64_t reduce(std::uint64_t v) const;
  void rebuild_elements();

  int n_;
  std::vector<std::uint64_t> basis_;  // pivot = highest set bit, fully reduced
  std::vector<PauliString> elements_;
};

/// Ordered list of groups G0 > G1 > ... > {I}.
class SubgroupChain {
 public:
  SubgroupChain() = default;

  /// Throws PreconditionError unless each level is a strict subgroup of the
  /// previous one and the last level is trivial.
  explicit SubgroupChain(std::vector<PauliGroup> levels);

  const std::vector<PauliGroup>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const PauliGroup& operator[](std::size_t i) const { return levels_[i]; }
  bool empty() const { return levels_.empty(); }

 private:
  std::vector<PauliGroup> levels_;
};

/// Smallest phase-free closure of the seed words plus the identity.
PauliGroup group_closure(int n_sites, std::span<const PauliString> seed);

/// Every Pauli word with |Tr(U P)| above `threshold`, with its normalised
/// coefficient Tr(U P)/2^n, in canonical order. Uses one Walsh-Hadamard
/// transform per x mask, O(4^n n) overall.
std::vector<std::pair<PauliString, complex>> pauli_coefficients(const Matrix& u,
                                                                double threshold);

/// Default cut on |Tr(U P)| for support extraction: 1e-10 * 2^n.
double support_tolerance(int n_sites);

/// Closure of the Pauli support of a unitary. Throws ValidationError for
/// non-unitary input.
PauliGroup support_group(const Matrix& u);

/// Largest proper subgroup of `group` containing none of `exclude` and all
/// of `keep`.
///
/// Candidates are the generator tuples drawn from the group's elements in
/// canonical order; the first tuple (lexicographically) reaching the largest
/// admissible size wins, so the result is deterministic. Throws
/// PreconditionError for the trivial group or when no admissible subgroup
/// exists.
PauliGroup maximal_subgroup(const PauliGroup& group,
                            std::span<const PauliString> exclude = {},
                            std::span<const PauliString> keep = {});

/// Every subgroup of index two, i.e. the kernels of the nonzero linear
/// functionals on the group's sorted generator basis, in functional order.
/// There are 2^d - 1 of them for a group of dimension d (d <= 20 enforced).
std::vector<PauliGroup> index_two_subgroups(const PauliGroup& group);

/// Repeated maximal_subgroup from `top` down to {I}. While a proper subgroup
/// can still contain the `keep` words they are retained at every level.
SubgroupChain build_subgroup_chain(const PauliGroup& top,
                                   std::span<const PauliString> keep = {});

}  // namespace mirrorchain
