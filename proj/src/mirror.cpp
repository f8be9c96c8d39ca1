#include "mirrorchain/mirror.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

#include "mirrorchain/errors.hpp"
#include "mirrorchain/pauli.hpp"

namespace mirrorchain {

namespace {

constexpr double kBellThreshold = 1.0 - 1e-6;

std::uint64_t site_bit(int n, int site) { return std::uint64_t{1} << (n - site); }

void check_sites(int n, const std::vector<int>& sites) {
  for (const int s : sites) {
    if (s < 1 || s > n) {
      throw DomainError("site " + std::to_string(s) + " outside 1.." + std::to_string(n));
    }
  }
  std::vector<int> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("sites must be distinct");
  }
}

// Full index from the bits of `sub` (first listed site most significant)
// placed on `sites`, with `rest` supplying every other bit.
std::uint64_t compose_index(int n, const std::vector<int>& sites, std::uint64_t sub,
                            std::uint64_t rest) {
  const int k = static_cast<int>(sites.size());
  std::uint64_t idx = rest;
  for (int j = 0; j < k; ++j) {
    const std::uint64_t bit = site_bit(n, sites[static_cast<std::size_t>(j)]);
    idx &= ~bit;
    if ((sub >> (k - 1 - j)) & 1U) idx |= bit;
  }
  return idx;
}

// Indices of the traced-out configurations: every assignment of the bits not
// in `sites`, with those sites' bits cleared.
std::vector<std::uint64_t> rest_configurations(int n, const std::vector<int>& sites) {
  std::uint64_t kept = 0;
  for (const int s : sites) kept |= site_bit(n, s);
  std::vector<std::uint64_t> out;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t c = 0; c < dim; ++c) {
    if ((c & kept) == 0) out.push_back(c);
  }
  return out;
}

Matrix partial_trace_vector(const Vector& psi, int n, const std::vector<int>& keep) {
  const auto k = static_cast<int>(keep.size());
  const Eigen::Index sub = Eigen::Index{1} << k;
  Matrix out = Matrix::Zero(sub, sub);
  for (const auto rest : rest_configurations(n, keep)) {
    Vector slice(sub);
    for (Eigen::Index a = 0; a < sub; ++a) {
      slice(a) = psi(static_cast<Eigen::Index>(compose_index(n, keep, static_cast<std::uint64_t>(a), rest)));
    }
    out += slice * slice.adjoint();
  }
  return out;
}

// op on `sites` (listed order) tensored with identity elsewhere.
Matrix embed_operator(const Matrix& op, int n, const std::vector<int>& sites) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  const auto k = static_cast<int>(sites.size());
  const Eigen::Index sub = Eigen::Index{1} << k;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto rest : rest_configurations(n, sites)) {
    for (Eigen::Index a = 0; a < sub; ++a) {
      const auto r = static_cast<Eigen::Index>(compose_index(n, sites, static_cast<std::uint64_t>(a), rest));
      for (Eigen::Index b = 0; b < sub; ++b) {
        const auto c = static_cast<Eigen::Index>(compose_index(n, sites, static_cast<std::uint64_t>(b), rest));
        out(r, c) = op(a, b);
      }
    }
  }
  return out;
}

// Relative sector phase for a sub-register basis state with bits `sub`
// (bit 0 = occupied).
complex relative_phase(const SectorPhaseTable& phases, std::uint64_t sub, int k_sites) {
  if (phases.empty()) return {1.0, 0.0};
  const int occupied = k_sites - std::popcount(sub);
  return phases[static_cast<std::size_t>(occupied)] / phases[0];
}

std::optional<SectorPhaseTable> try_sector_phases(const Matrix& u) {
  try {
    return sector_phases(u);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

double real_trace_product(const Matrix& a, const Matrix& b) {
  // tr(A B) for Hermitian A, B is real.
  return (a.transpose().array() * b.array()).sum().real();
}

void check_metric_inputs(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("metric operands differ in shape");
  }
  require_hermitian(a, 1e-8);
  require_hermitian(b, 1e-8);
}

}  // namespace

Matrix partial_trace(const Matrix& rho, int n_sites, const std::vector<int>& keep) {
  if (rho.rows() != rho.cols() || rho.rows() != (Eigen::Index{1} << n_sites)) {
    throw DimensionError("density matrix does not match the site count");
  }
  check_sites(n_sites, keep);
  const auto k = static_cast<int>(keep.size());
  const Eigen::Index sub = Eigen::Index{1} << k;
  Matrix out = Matrix::Zero(sub, sub);
  for (const auto rest : rest_configurations(n_sites, keep)) {
    for (Eigen::Index a = 0; a < sub; ++a) {
      const auto r = static_cast<Eigen::Index>(compose_index(n_sites, keep, static_cast<std::uint64_t>(a), rest));
      for (Eigen::Index b = 0; b < sub; ++b) {
        const auto c = static_cast<Eigen::Index>(compose_index(n_sites, keep, static_cast<std::uint64_t>(b), rest));
        out(a, b) += rho(r, c);
      }
    }
  }
  return out;
}

SectorPhaseTable sector_phases(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) throw DimensionError("operator is not square");
  const int n = sites_for_dimension(u.rows());
  SectorPhaseTable table(static_cast<std::size_t>(n + 1), complex{0.0, 0.0});
  std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
  std::vector<std::string> offending;
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t c = 0; c < dim; ++c) {
    const complex amp = u(static_cast<Eigen::Index>(mirror_index(c, n)), static_cast<Eigen::Index>(c));
    const auto k = static_cast<std::size_t>(excitation_count(c, n));
    bool ok = std::abs(std::abs(amp) - 1.0) <= tol;
    if (ok && !seen[k]) {
      table[k] = amp / std::abs(amp);
      seen[k] = true;
    } else if (ok) {
      ok = std::abs(amp - table[k]) <= tol;
    }
    if (!ok) offending.push_back(occupation_label(c, n));
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << "operator is not a perfect mirror on " << offending.size() << " basis state(s):";
    for (std::size_t i = 0; i < offending.size() && i < 16; ++i) msg << ' ' << offending[i];
    if (offending.size() > 16) msg << " ...";
    throw ValidationError(msg.str());
  }
  return table;
}

double fidelity_metric(const Matrix& rho_th, const Matrix& rho_expt) {
  check_metric_inputs(rho_th, rho_expt);
  const double aa = real_trace_product(rho_th, rho_th);
  const double bb = real_trace_product(rho_expt, rho_expt);
  if (aa <= 1e-300 || bb <= 1e-300) throw MetricError("fidelity undefined for a zero-norm operator");
  return real_trace_product(rho_th, rho_expt) / std::sqrt(aa * bb);
}

double attenuated_correlation(const Matrix& rho_th, const Matrix& rho_expt) {
  check_metric_inputs(rho_th, rho_expt);
  const double aa = real_trace_product(rho_th, rho_th);
  if (aa <= 1e-300) throw MetricError("correlation undefined for a zero-norm reference");
  return real_trace_product(rho_th, rho_expt) / aa;
}

std::string_view mode_name(TransferMode mode) {
  return mode == TransferMode::kPure ? "pure" : "deviation";
}

TransferMode parse_mode(std::string_view text) {
  if (text == "pure") return TransferMode::kPure;
  if (text == "deviation") return TransferMode::kDeviation;
  throw ParseError("unknown transfer mode \"" + std::string(text) + "\"");
}

std::string_view bell_name(BellKind kind) {
  switch (kind) {
    case BellKind::kPhiPlus: return "phi+";
    case BellKind::kPhiMinus: return "phi-";
    case BellKind::kPsiPlus: return "psi+";
    case BellKind::kPsiMinus: return "psi-";
  }
  return "?";
}

BellKind parse_bell(std::string_view text) {
  for (const auto kind : {BellKind::kPhiPlus, BellKind::kPhiMinus, BellKind::kPsiPlus, BellKind::kPsiMinus}) {
    if (bell_name(kind) == text) return kind;
  }
  throw ParseError("unknown Bell state \"" + std::string(text) + "\" (use phi+, phi-, psi+, psi-)");
}

Vector bell_vector(BellKind kind) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  // Occupation labels: |00> is index 3, |11> index 0, |01> index 2, |10> index 1.
  switch (kind) {
    case BellKind::kPhiPlus: v(3) = r; v(0) = r; break;
    case BellKind::kPhiMinus: v(3) = r; v(0) = -r; break;
    case BellKind::kPsiPlus: v(2) = r; v(1) = r; break;
    case BellKind::kPsiMinus: v(2) = r; v(1) = -r; break;
  }
  return v;
}

Vector single_site_state(std::string_view name) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector v(2);
  if (name == "1" || name == "+z") {
    v << 1.0, 0.0;
  } else if (name == "0" || name == "-z") {
    v << 0.0, 1.0;
  } else if (name == "+x") {
    v << r, r;
  } else if (name == "-x") {
    v << r, -r;
  } else if (name == "+y") {
    v << r, complex{0.0, r};
  } else if (name == "-y") {
    v << r, complex{0.0, -r};
  } else {
    throw ParseError("unknown single-site state \"" + std::string(name) + "\"");
  }
  return v;
}

std::vector<std::string> six_state_design() { return {"+x", "-x", "+y", "-y", "+z", "-z"}; }

BellMatch identify_bell(const Matrix& rho_pair) {
  if (rho_pair.rows() != 4 || rho_pair.cols() != 4) throw DimensionError("Bell identification needs a 4x4 state");
  const double tr = rho_pair.trace().real();
  if (std::abs(tr) <= 1e-300) throw MetricError("cannot classify a traceless pair state");
  BellMatch best;
  for (const auto kind : {BellKind::kPhiPlus, BellKind::kPhiMinus, BellKind::kPsiPlus, BellKind::kPsiMinus}) {
    const Vector b = bell_vector(kind);
    const double overlap = (b.adjoint() * rho_pair * b)(0, 0).real() / tr;
    if (overlap > best.overlap) {
      best.overlap = overlap;
      best.kind = kind;
    }
  }
  if (best.overlap < kBellThreshold) best.kind.reset();
  return best;
}

TransferReport transfer_single(const ChainSpec& spec, int site, const Matrix& state,
                               TransferMode mode, double tau) {
  spec.validate();
  const int n = spec.n_sites;
  if (site < 1 || site > n) {
    throw DomainError("site " + std::to_string(site) + " outside 1.." + std::to_string(n));
  }
  Matrix rho_s;
  if (state.rows() == 2 && state.cols() == 1) {
    if (std::abs(state.col(0).norm() - 1.0) > 1e-10) throw ValidationError("single-site state is not normalised");
    rho_s = state.col(0) * state.col(0).adjoint();
  } else if (state.rows() == 2 && state.cols() == 2) {
    require_hermitian(state);
    rho_s = state;
  } else {
    throw DimensionError("single-site input must be a 2-vector or a 2x2 matrix");
  }

  const int dest = n + 1 - site;
  const Matrix u = chain_propagator(spec, tau);
  const auto phases = try_sector_phases(u);

  TransferReport report;
  report.mode = mode;
  report.n_sites = n;
  report.source_sites = {site};
  report.destination_sites = {dest};
  report.input = rho_s;
  if (phases) report.sector_phases = *phases;

  // Occupied amplitude (index 0) picks up phase(1)/phase(0) relative to empty.
  const complex omega = phases ? relative_phase(*phases, 0, 1) : complex{1.0, 0.0};
  Matrix v = Matrix::Identity(2, 2);
  v(0, 0) = omega;
  report.expected = v * rho_s * v.adjoint();

  const std::vector<int> src{site};
  const std::vector<int> dst{dest};
  if (mode == TransferMode::kPure) {
    // Evolve the eigenvectors of rho_s with every other site empty.
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_s);
    const std::uint64_t empty = (std::uint64_t{1} << n) - 1;
    Matrix reduced = Matrix::Zero(2, 2);
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double weight = solver.eigenvalues()(j);
      if (std::abs(weight) <= 1e-15) continue;
      Vector full = Vector::Zero(Eigen::Index{1} << n);
      for (std::uint64_t b = 0; b < 2; ++b) {
        full(static_cast<Eigen::Index>(compose_index(n, src, b, empty))) =
            solver.eigenvectors()(static_cast<Eigen::Index>(b), j);
      }
      reduced += weight * partial_trace_vector(u * full, n, dst);
    }
    report.raw_reduced = reduced;
    report.output = reduced;
  } else {
    const Matrix rho_full = embed_operator(rho_s, n, src);
    const Matrix out = u * rho_full * u.adjoint();
    const double scale = std::ldexp(1.0, n - 1);
    report.raw_reduced = partial_trace(out, n, dst) / scale;

    // Anti-phase readout: x/y through prod_{j != m}(-Z_j) sigma_m, z through Z_m.
    std::string base(static_cast<std::size_t>(n), 'Z');
    auto readout = [&](char letter) {
      std::string w = base;
      w[static_cast<std::size_t>(dest - 1)] = letter;
      const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
      return sign * pauli_trace(out, PauliString::parse(w)).real() / scale;
    };
    const double cx = readout('X');
    const double cy = readout('Y');
    const double cz = pauli_trace(out, PauliString::single(n, dest, 'Z')).real() / scale;
    const double ci = out.trace().real() / scale;
    Matrix decoded(2, 2);
    decoded << complex{ci + cz, 0.0}, complex{cx, -cy}, complex{cx, cy}, complex{ci - cz, 0.0};
    report.output = 0.5 * decoded;
    report.anti_phase_decoded = true;
  }
  report.fidelity = fidelity_metric(report.expected, report.output);
  report.correlation = attenuated_correlation(report.expected, report.output);
  return report;
}

TransferReport transfer_entangled(const ChainSpec& spec, std::pair<int, int> sites, BellKind kind,
                                  TransferMode mode, double tau) {
  spec.validate();
  const int n = spec.n_sites;
  const std::vector<int> src{sites.first, sites.second};
  check_sites(n, src);
  std::vector<int> dst{n + 1 - sites.first, n + 1 - sites.second};
  const bool swapped = dst[0] > dst[1];
  std::sort(dst.begin(), dst.end());

  const Matrix u = chain_propagator(spec, tau);
  const auto phases = try_sector_phases(u);

  TransferReport report;
  report.mode = mode;
  report.n_sites = n;
  report.source_sites = src;
  report.destination_sites = dst;
  report.bell_input = std::string(bell_name(kind));
  if (phases) report.sector_phases = *phases;

  const Vector bell = bell_vector(kind);
  report.input = bell * bell.adjoint();

  // Mirror image on the destination pair in ascending site order.
  Vector image = Vector::Zero(4);
  for (std::uint64_t b = 0; b < 4; ++b) {
    const std::uint64_t hi = b >> 1;
    const std::uint64_t lo = b & 1U;
    const std::uint64_t target = swapped ? ((lo << 1) | hi) : b;
    const complex ph = phases ? relative_phase(*phases, b, 2) : complex{1.0, 0.0};
    image(static_cast<Eigen::Index>(target)) = ph * bell(static_cast<Eigen::Index>(b));
  }
  report.expected = image * image.adjoint();

  if (mode == TransferMode::kPure) {
    const std::uint64_t empty = (std::uint64_t{1} << n) - 1;
    Vector full = Vector::Zero(Eigen::Index{1} << n);
    for (std::uint64_t b = 0; b < 4; ++b) {
      full(static_cast<Eigen::Index>(compose_index(n, src, b, empty))) = bell(static_cast<Eigen::Index>(b));
    }
    report.raw_reduced = partial_trace_vector(u * full, n, dst);
    report.output = report.raw_reduced;
  } else {
    const Matrix out = u * embed_operator(report.input, n, src) * u.adjoint();
    const double scale = std::ldexp(1.0, n - 2);
    report.raw_reduced = partial_trace(out, n, dst) / scale;
    report.output = report.raw_reduced;
    report.spectators_maximally_mixed = max_abs(out - embed_operator(report.output, n, dst)) <= 1e-9;
  }
  const BellMatch match = identify_bell(report.output);
  report.bell_overlap = match.overlap;
  if (match.kind) report.bell_output = std::string(bell_name(*match.kind));
  report.fidelity = fidelity_metric(report.expected, report.output);
  report.correlation = attenuated_correlation(report.expected, report.output);
  return report;
}

}  // namespace mirrorchain
