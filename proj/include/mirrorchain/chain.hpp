#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorchain/linalg.hpp"

namespace mirrorchain {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhaseTolerance = 1e-9;
inline constexpr int kWitnessBound = 64;

/// Nearest-neighbour XY chain: N sites, N-1 couplings J_i, N fields h_i.
struct ChainSpec {
  int n_sites = 0;
  std::vector<double> couplings;
  std::vector<double> fields;

  /// Chain with J_i = sqrt(i (N - i)) and zero fields.
  static ChainSpec engineered(int n_sites);

  /// Uniform couplings, zero fields.
  static ChainSpec uniform(int n_sites, double coupling = 1.0);

  /// Throws DomainError for N < 1 and DimensionError for wrong lengths.
  void validate() const;

  /// J_i = J_{N-i} and h_i = h_{N+1-i} for every i.
  bool mirror_symmetric(double tol = kSymmetryTolerance) const;
};

/// J_i = sqrt(i (N - i)) for i = 1..N-1. Throws DomainError for N < 2.
std::vector<double> engineered_couplings(int n_sites);

/// 1/2 sum J_i (X_i X_{i+1} + Y_i Y_{i+1}) + 1/2 sum h_i (Z_i + 1), dense.
Matrix build_hamiltonian(const ChainSpec& spec);

/// Tridiagonal N x N matrix with h_i on the diagonal and J_i beside it.
RealMatrix single_excitation_matrix(const ChainSpec& spec);

/// Sum of Z_i over all sites, as a dense diagonal matrix.
Matrix total_z(int n_sites);

struct SpectralReport {
  RealVector eigenvalues;       ///< ascending
  std::vector<int> parities;    ///< +1 even, -1 odd under site reversal
  RealMatrix eigenvectors;      ///< columns match eigenvalues
  double mirror_time = 0.0;
  double global_phase = 0.0;    ///< phi_0 in (-pi, pi]
  /// eps_nu tau = (2 n_nu + q_nu) pi - phi_0 with q_nu = 0 for even and
  /// 1 for odd eigenvectors; empty when the condition fails.
  std::vector<long> witnesses;
  double max_phase_error = 0.0; ///< worst mismatch of the condition, radians
  bool degenerate = false;
  bool parities_alternate = false;
  bool satisfied = false;
};

/// Spectral test for perfect mirror inversion at time tau. The even and
/// odd mirror sectors are diagonalised separately so every eigenvector has
/// exact parity. Throws PreconditionError unless the spec is mirror
/// symmetric with strictly positive couplings.
SpectralReport check_mirror_condition(const ChainSpec& spec, double tau);

/// exp(-i H t) through Hermitian eigendecomposition; ValidationError when
/// H is not Hermitian.
Matrix propagator(const Matrix& h, double t);

/// Propagator of the chain described by `spec` at time t.
Matrix chain_propagator(const ChainSpec& spec, double t);

/// The engineered chain's propagator at its mirror time pi/2.
Matrix engineered_mirror_unitary(int n_sites);

// Basis labels. Matrices use the standard qubit index with site 1 as the
// most significant bit and index bit 0 meaning Z = +1. Occupation labels
// write '1' for an occupied site, which is the Z = +1 state, so a label is
// the bitwise complement of its index.

/// Index of an occupation label such as "10000". ParseError on bad text.
std::uint64_t basis_index(std::string_view occupation);
std::string occupation_label(std::uint64_t index, int n_sites);
int excitation_count(std::uint64_t index, int n_sites);
/// Index of the site-reversed basis state.
std::uint64_t mirror_index(std::uint64_t index, int n_sites);

/// Converts a state vector (or density matrix) written in occupation-label
/// order into index order, and back; both directions reverse the order.
Vector label_to_index_order(const Vector& v);
Matrix label_to_index_order(const Matrix& m);

class QuantumState {
 public:
  enum class Kind { kPure, kMixed, kDeviation };

  /// Unit-norm vector (tolerance 1e-10).
  static QuantumState pure(Vector psi);
  /// Hermitian, unit trace, eigenvalues >= -1e-10.
  static QuantumState mixed(Matrix rho);
  /// Hermitian; trace and positivity are not required.
  static QuantumState deviation(Matrix rho);

  Kind kind() const { return kind_; }
  int n_sites() const { return n_; }
  Eigen::Index dimension() const;
  const Vector& vector() const;
  const Matrix& matrix() const;

  /// Density matrix for every kind (|psi><psi| for pure states).
  Matrix density() const;

 private:
  QuantumState(Kind kind, Vector psi, Matrix rho);

  Kind kind_;
  int n_ = 0;
  Vector psi_;
  Matrix rho_;
};

/// U|psi> for pure states, U rho U^dag otherwise. DimensionError on mismatch.
QuantumState evolve(const QuantumState& state, const Matrix& u);

}  // namespace mirrorchain
