#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>

namespace mirrorchain {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Largest site count for which dense 2^n x 2^n operators are built.
inline constexpr int kMaxDenseSites = 12;

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kHermiticityTolerance = 1e-10;

/// Throws ResourceError when 2^n_sites operators would exceed the cap.
void require_dense_size(int n_sites, int cap = kMaxDenseSites);

/// Returns log2(dim) or throws DimensionError if dim is not a power of two.
int sites_for_dimension(Eigen::Index dim);

double max_abs(const Matrix& m);
bool is_unitary(const Matrix& u, double tol = kUnitarityTolerance);
bool is_hermitian(const Matrix& h, double tol = kHermiticityTolerance);
void require_unitary(const Matrix& u, double tol = kUnitarityTolerance);
void require_hermitian(const Matrix& h, double tol = kHermiticityTolerance);

/// exp(-i H t) for Hermitian H.
///
/// H is first split into the connected components of its sparsity graph
/// (entries that are exactly zero decouple), and each block is
/// exponentiated through its own Hermitian eigendecomposition. XY chain
/// Hamiltonians split into excitation sectors this way, so an N = 10 chain
/// never diagonalises anything larger than C(10,5) = 252.
Matrix hermitian_exp(const Matrix& h, double t);

/// |Tr(U^dag V)| / dim, the global-phase-invariant gate overlap.
double unitary_fidelity(const Matrix& u, const Matrix& v);

/// Thread count used by internal parallel loops. Reads MIRRORCHAIN_THREADS
/// once; defaults to the hardware concurrency.
unsigned worker_threads();

/// Runs body(i) for i in [0, count). Work is statically partitioned, so
/// callers that write only to slot i get deterministic results.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mirrorchain
