#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorchain/chain.hpp"
#include "mirrorchain/linalg.hpp"

namespace mirrorchain {

// All matrices here are in the computational (qubit index) basis: index 0
// of a single site is Z = +1, the occupied state '1'.

/// Reduced density matrix on `keep` (1-based sites, output ordered as
/// listed). Works for deviation matrices as well.
Matrix partial_trace(const Matrix& rho, int n_sites, const std::vector<int>& keep);

/// Phase acquired by k-excitation basis states, index k = 0..N.
using SectorPhaseTable = std::vector<complex>;

/// Reads the excitation-sector phases of a perfect mirror propagator.
/// Throws ValidationError, naming offending basis states by occupation
/// label, when some basis state does not map to its reversal or a sector's
/// phases disagree by more than `tol`.
SectorPhaseTable sector_phases(const Matrix& u, double tol = 1e-9);

/// tr(A B) / sqrt(tr(A^2) tr(B^2)). MetricError for a zero-norm argument.
double fidelity_metric(const Matrix& rho_th, const Matrix& rho_expt);

/// tr(A B) / tr(A^2). MetricError when rho_th has zero norm.
double attenuated_correlation(const Matrix& rho_th, const Matrix& rho_expt);

enum class TransferMode { kPure, kDeviation };

std::string_view mode_name(TransferMode mode);
TransferMode parse_mode(std::string_view text);

enum class BellKind { kPhiPlus, kPhiMinus, kPsiPlus, kPsiMinus };

std::string_view bell_name(BellKind kind);
/// Accepts "phi+", "phi-", "psi+", "psi-".
BellKind parse_bell(std::string_view text);

/// Bell vector on two sites written in occupation labels, e.g.
/// phi+ = (|00> + |11>)/sqrt(2), as a 4-vector in index order.
Vector bell_vector(BellKind kind);

/// Named single-site states: "0" (empty), "1" (occupied) and the six
/// design states "+x", "-x", "+y", "-y", "+z", "-z". Index order.
Vector single_site_state(std::string_view name);

/// The six-state input design (+-x, +-y, +-z eigenstates).
std::vector<std::string> six_state_design();

struct BellMatch {
  std::optional<BellKind> kind;  ///< empty when the best overlap is below threshold
  double overlap = 0.0;          ///< <B|rho|B> / tr(rho) for the best B
};

/// Maximal-overlap classification with acceptance threshold 1 - 1e-6.
BellMatch identify_bell(const Matrix& rho_pair);

struct TransferReport {
  TransferMode mode = TransferMode::kPure;
  int n_sites = 0;
  std::vector<int> source_sites;
  std::vector<int> destination_sites;
  Matrix input;           ///< source-site state (density or deviation)
  Matrix output;          ///< reduced destination state used for the metrics
  Matrix expected;        ///< mirror image of the input with sector phases applied
  Matrix raw_reduced;     ///< plain partial trace on the destination sites
  double fidelity = 0.0;
  double correlation = 0.0;
  SectorPhaseTable sector_phases;
  std::optional<std::string> bell_input;
  std::optional<std::string> bell_output;
  double bell_overlap = 0.0;
  /// Deviation-mode pair transfer: the full output equals the reduced pair
  /// state tensored with identities on the other sites.
  std::optional<bool> spectators_maximally_mixed;
  /// Single-site deviation transfer decodes the anti-phase partner of the
  /// mirror site; true when that decoding was used.
  bool anti_phase_decoded = false;
};

/// Transfers a single-site state from `site` to N + 1 - site.
///
/// Pure mode: the other sites start empty; `state` is a 2-vector or a 2x2
/// density matrix. Deviation mode: `state` is a 2x2 Hermitian deviation at
/// the site with identity elsewhere. Its x/y parts arrive anti-phase with
/// every other spin, so they are read out with prod_{j != m}(-Z_j) sigma_m;
/// the z part is read as Z_m. DomainError for a site out of range.
TransferReport transfer_single(const ChainSpec& spec, int site, const Matrix& state,
                               TransferMode mode, double tau = kPi / 2.0);

/// Transfers a Bell state on `sites` to the mirror pair. Pure mode leaves
/// the other sites empty; deviation mode uses |B><B| tensored with identity.
TransferReport transfer_entangled(const ChainSpec& spec, std::pair<int, int> sites,
                                  BellKind kind, TransferMode mode, double tau = kPi / 2.0);

}  // namespace mirrorchain
