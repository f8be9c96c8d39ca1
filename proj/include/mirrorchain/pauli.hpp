#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "mirrorchain/linalg.hpp"

namespace mirrorchain {

/// A phase-free word over {I, X, Y, Z} on n sites.
///
/// Stored as two bit masks (the symplectic x and z parts). Site 1 is the
/// most significant bit of both masks, matching the computational-basis
/// index convention used for dense matrices, so the word "XZ" acts as
/// X on the high qubit and Z on the low qubit.
class PauliString {
 public:
  static constexpr int kMaxSites = 32;

  PauliString() = default;

  /// Identity word on n sites.
  explicit PauliString(int n_sites);

  /// Parses the canonical text encoding ("XIZY", site 1 first). Throws
  /// ParseError on any other character and DomainError on an empty string.
  static PauliString parse(std::string_view letters);

  static PauliString from_masks(int n_sites, std::uint64_t x, std::uint64_t z);

  /// Word with `letter` at the given 1-based site and I elsewhere.
  static PauliString single(int n_sites, int site, char letter);

  int n_sites() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }

  /// Letter at the 1-based site.
  char letter(int site) const;
  bool is_identity() const { return (x_ | z_) == 0; }

  /// Number of non-identity sites.
  int weight() const;

  bool commutes_with(const PauliString& other) const;

  /// Canonical text encoding.
  std::string str() const;

  /// Ordering key for the canonical order I < X < Y < Z, site 1 most
  /// significant. Equal keys imply equal words on the same site count.
  std::uint64_t canonical_key() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Canonical order: by site count, then lexicographically with I < X < Y < Z.
std::strong_ordering canonical_compare(const PauliString& a, const PauliString& b);

struct CanonicalLess {
  bool operator()(const PauliString& a, const PauliString& b) const {
    return canonical_compare(a, b) < 0;
  }
};

/// A Pauli word with a fourth-root-of-unity phase, i^power.
struct PhasedPauli {
  int power = 0;  ///< phase = i^power, power in [0, 4)
  PauliString word;

  complex phase() const;

  /// "+1", "-1", "+i" or "-i".
  std::string phase_str() const;

  static int parse_phase(std::string_view text);

  friend bool operator==(const PhasedPauli&, const PhasedPauli&) = default;
};

/// Phase-free product of two words (site-wise symbol product).
PauliString word_product(const PauliString& a, const PauliString& b);

/// Exact product a*b including its phase.
PhasedPauli pauli_mul(const PauliString& a, const PauliString& b);

/// Dense 2^n x 2^n matrix for phase * word. Throws ResourceError when n
/// exceeds `cap`.
Matrix pauli_matrix(const PhasedPauli& p, int cap = kMaxDenseSites);
Matrix pauli_matrix(const PauliString& p, int cap = kMaxDenseSites);

/// Tr(U P) for a phase-free word P; O(2^n) without forming P. Since P is
/// Hermitian this also equals Tr(U P^dag).
complex pauli_trace(const Matrix& u, const PauliString& p);

/// U * P computed as a signed column permutation, O(4^n).
Matrix right_multiply(const Matrix& u, const PauliString& p);

/// P * U computed as a signed row permutation, O(4^n).
Matrix left_multiply(const PauliString& p, const Matrix& u);

/// exp(-i theta P) as a dense matrix.
Matrix pauli_exponential(const PauliString& p, double theta);

/// U * exp(-i theta P) without forming the exponential.
Matrix apply_pauli_exponential_right(const Matrix& u, const PauliString& p, double theta);

}  // namespace mirrorchain
