#include "mirrorchain/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

namespace {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

struct SectorEigen {
  double value;
  int parity;
  RealVector vec;
};

void solve_sector(const RealMatrix& h1, const RealMatrix& basis, int parity,
                  std::vector<SectorEigen>& out) {
  if (basis.cols() == 0) return;
  const RealMatrix block = basis.transpose() * h1 * basis;
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(block);
  for (Eigen::Index k = 0; k < block.rows(); ++k) {
    out.push_back({solver.eigenvalues()(k), parity, basis * solver.eigenvectors().col(k)});
  }
}

}  // namespace

ChainSpec ChainSpec::engineered(int n_sites) {
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.couplings = engineered_couplings(n_sites);
  spec.fields.assign(static_cast<std::size_t>(n_sites), 0.0);
  return spec;
}

ChainSpec ChainSpec::uniform(int n_sites, double coupling) {
  if (n_sites < 1) throw DomainError("chain needs at least one site");
  ChainSpec spec;
  spec.n_sites = n_sites;
  spec.couplings.assign(static_cast<std::size_t>(n_sites - 1), coupling);
  spec.fields.assign(static_cast<std::size_t>(n_sites), 0.0);
  return spec;
}

void ChainSpec::validate() const {
  if (n_sites < 1) throw DomainError("chain needs at least one site");
  if (couplings.size() != static_cast<std::size_t>(n_sites - 1)) {
    throw DimensionError("expected " + std::to_string(n_sites - 1) + " couplings, got " +
                         std::to_string(couplings.size()));
  }
  if (fields.size() != static_cast<std::size_t>(n_sites)) {
    throw DimensionError("expected " + std::to_string(n_sites) + " fields, got " +
                         std::to_string(fields.size()));
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(couplings.begin(), couplings.end(), finite) ||
      !std::all_of(fields.begin(), fields.end(), finite)) {
    throw DomainError("chain parameters must be finite");
  }
}

bool ChainSpec::mirror_symmetric(double tol) const {
  validate();
  const std::size_t nc = couplings.size();
  for (std::size_t i = 0; i < nc; ++i) {
    if (std::abs(couplings[i] - couplings[nc - 1 - i]) > tol) return false;
  }
  const std::size_t nf = fields.size();
  for (std::size_t i = 0; i < nf; ++i) {
    if (std::abs(fields[i] - fields[nf - 1 - i]) > tol) return false;
  }
  return true;
}

std::vector<double> engineered_couplings(int n_sites) {
  if (n_sites < 2) throw DomainError("engineered couplings need N >= 2");
  std::vector<double> j(static_cast<std::size_t>(n_sites - 1));
  for (int i = 1; i < n_sites; ++i) {
    j[static_cast<std::size_t>(i - 1)] = std::sqrt(static_cast<double>(i) * (n_sites - i));
  }
  return j;
}

Matrix build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  require_dense_size(n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t c = 0; c < dim; ++c) {
    double diag = 0.0;
    for (int site = 1; site <= n; ++site) {
      const bool up = ((c >> (n - site)) & 1U) == 0;  // Z = +1
      if (up) diag += spec.fields[static_cast<std::size_t>(site - 1)];
    }
    h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) = diag;
    // (XX + YY)/2 swaps antiparallel neighbours with amplitude 1.
    for (int site = 1; site < n; ++site) {
      const std::uint64_t pair = std::uint64_t{3} << (n - site - 1);
      const std::uint64_t bits = c & pair;
      if (bits != 0 && bits != pair) {
        h(static_cast<Eigen::Index>(c ^ pair), static_cast<Eigen::Index>(c)) +=
            spec.couplings[static_cast<std::size_t>(site - 1)];
      }
    }
  }
  return h;
}

RealMatrix single_excitation_matrix(const ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = spec.fields[static_cast<std::size_t>(i)];
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = spec.couplings[static_cast<std::size_t>(i)];
    m(i + 1, i) = spec.couplings[static_cast<std::size_t>(i)];
  }
  return m;
}

Matrix total_z(int n_sites) {
  require_dense_size(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Vector diag(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    diag(c) = static_cast<double>(n_sites - 2 * std::popcount(static_cast<std::uint64_t>(c)));
  }
  return diag.asDiagonal();
}

SpectralReport check_mirror_condition(const ChainSpec& spec, double tau) {
  if (!spec.mirror_symmetric()) {
    throw PreconditionError("mirror condition needs a mirror-symmetric chain");
  }
  if (std::any_of(spec.couplings.begin(), spec.couplings.end(),
                  [](double j) { return !(j > 0.0); })) {
    throw PreconditionError("mirror condition needs strictly positive couplings");
  }
  const int n = spec.n_sites;
  const RealMatrix h1 = single_excitation_matrix(spec);

  // Orthonormal bases of the even and odd subspaces of site reversal.
  const int pairs = n / 2;
  RealMatrix even = RealMatrix::Zero(n, pairs + (n % 2));
  RealMatrix odd = RealMatrix::Zero(n, pairs);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < pairs; ++i) {
    even(i, i) = r;
    even(n - 1 - i, i) = r;
    odd(i, i) = r;
    odd(n - 1 - i, i) = -r;
  }
  if (n % 2 == 1) even(pairs, pairs) = 1.0;

  std::vector<SectorEigen> eig;
  solve_sector(h1, even, +1, eig);
  solve_sector(h1, odd, -1, eig);
  std::stable_sort(eig.begin(), eig.end(),
                   [](const SectorEigen& a, const SectorEigen& b) { return a.value < b.value; });

  SpectralReport report;
  report.mirror_time = tau;
  report.eigenvalues.resize(n);
  report.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    report.eigenvalues(k) = eig[static_cast<std::size_t>(k)].value;
    report.eigenvectors.col(k) = eig[static_cast<std::size_t>(k)].vec;
    report.parities.push_back(eig[static_cast<std::size_t>(k)].parity);
  }
  report.parities_alternate = true;
  for (int k = 1; k < n; ++k) {
    if (report.eigenvalues(k) - report.eigenvalues(k - 1) < kPhaseTolerance) report.degenerate = true;
    if (report.parities[static_cast<std::size_t>(k)] == report.parities[static_cast<std::size_t>(k - 1)]) {
      report.parities_alternate = false;
    }
  }

  // e^{-i eps tau} = e^{i phi_0} p, so eps tau + q pi is the same angle (-phi_0)
  // for every eigenvector.
  auto q_of = [&](int k) { return report.parities[static_cast<std::size_t>(k)] < 0 ? 1 : 0; };
  std::vector<double> rotated(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) rotated[static_cast<std::size_t>(k)] = report.eigenvalues(k) * tau + q_of(k) * kPi;
  report.global_phase = wrap_angle(-rotated[0]);
  for (int k = 0; k < n; ++k) {
    const double err = std::abs(wrap_angle(rotated[static_cast<std::size_t>(k)] + report.global_phase));
    report.max_phase_error = std::max(report.max_phase_error, err);
  }
  report.satisfied = report.max_phase_error <= kPhaseTolerance;
  if (report.satisfied) {
    for (int k = 0; k < n; ++k) {
      const double x =
          (report.eigenvalues(k) * tau + report.global_phase - q_of(k) * kPi) / (2.0 * kPi);
      const long w = std::lround(x);
      if (std::abs(w) > kWitnessBound) {
        report.satisfied = false;
        report.witnesses.clear();
        break;
      }
      report.witnesses.push_back(w);
    }
  }
  return report;
}

Matrix propagator(const Matrix& h, double t) { return hermitian_exp(h, t); }

Matrix chain_propagator(const ChainSpec& spec, double t) {
  return hermitian_exp(build_hamiltonian(spec), t);
}

Matrix engineered_mirror_unitary(int n_sites) {
  return chain_propagator(ChainSpec::engineered(n_sites), kPi / 2.0);
}

std::uint64_t basis_index(std::string_view occupation) {
  if (occupation.empty() || occupation.size() > 32) {
    throw ParseError("occupation label must have 1..32 sites");
  }
  std::uint64_t index = 0;
  for (const char ch : occupation) {
    if (ch != '0' && ch != '1') {
      throw ParseError("occupation label \"" + std::string(occupation) + "\" must be 0/1");
    }
    index = (index << 1) | (ch == '0' ? 1U : 0U);
  }
  return index;
}

std::string occupation_label(std::uint64_t index, int n_sites) {
  std::string out(static_cast<std::size_t>(n_sites), '0');
  for (int site = 1; site <= n_sites; ++site) {
    if (((index >> (n_sites - site)) & 1U) == 0) out[static_cast<std::size_t>(site - 1)] = '1';
  }
  return out;
}

int excitation_count(std::uint64_t index, int n_sites) {
  return n_sites - std::popcount(index);
}

std::uint64_t mirror_index(std::uint64_t index, int n_sites) {
  std::uint64_t out = 0;
  for (int b = 0; b < n_sites; ++b) {
    if ((index >> b) & 1U) out |= std::uint64_t{1} << (n_sites - 1 - b);
  }
  return out;
}

Vector label_to_index_order(const Vector& v) { return v.reverse(); }

Matrix label_to_index_order(const Matrix& m) { return m.reverse(); }

QuantumState::QuantumState(Kind kind, Vector psi, Matrix rho)
    : kind_(kind), psi_(std::move(psi)), rho_(std::move(rho)) {
  n_ = sites_for_dimension(kind_ == Kind::kPure ? psi_.size() : rho_.rows());
}

QuantumState QuantumState::pure(Vector psi) {
  sites_for_dimension(psi.size());
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ValidationError("pure state is not normalised");
  return QuantumState(Kind::kPure, std::move(psi), Matrix());
}

QuantumState QuantumState::mixed(Matrix rho) {
  require_hermitian(rho);
  if (std::abs(rho.trace() - complex{1.0, 0.0}) > 1e-10) {
    throw ValidationError("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
  return QuantumState(Kind::kMixed, Vector(), std::move(rho));
}

QuantumState QuantumState::deviation(Matrix rho) {
  require_hermitian(rho);
  return QuantumState(Kind::kDeviation, Vector(), std::move(rho));
}

Eigen::Index QuantumState::dimension() const {
  return kind_ == Kind::kPure ? psi_.size() : rho_.rows();
}

const Vector& QuantumState::vector() const {
  if (kind_ != Kind::kPure) throw PreconditionError("state is not pure");
  return psi_;
}

const Matrix& QuantumState::matrix() const {
  if (kind_ == Kind::kPure) throw PreconditionError("state is pure; use density()");
  return rho_;
}

Matrix QuantumState::density() const {
  return kind_ == Kind::kPure ? Matrix(psi_ * psi_.adjoint()) : rho_;
}

QuantumState evolve(const QuantumState& state, const Matrix& u) {
  if (u.rows() != u.cols() || u.rows() != state.dimension()) {
    throw DimensionError("propagator and state dimensions differ");
  }
  switch (state.kind()) {
    case QuantumState::Kind::kPure:
      return QuantumState::pure(u * state.vector());
    case QuantumState::Kind::kMixed: {
      Matrix out = u * state.matrix() * u.adjoint();
      out = 0.5 * (out + out.adjoint()).eval();
      return QuantumState::mixed(std::move(out));
    }
    case QuantumState::Kind::kDeviation:
    default: {
      Matrix out = u * state.matrix() * u.adjoint();
      out = 0.5 * (out + out.adjoint()).eval();
      return QuantumState::deviation(std::move(out));
    }
  }
}

}  // namespace mirrorchain
