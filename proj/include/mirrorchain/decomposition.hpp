#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mirrorchain/linalg.hpp"
#include "mirrorchain/pauli.hpp"
#include "mirrorchain/pauli_group.hpp"

namespace mirrorchain {

/// One factor exp(-i angle word).
struct PauliFactor {
  PauliString word;
  double angle = 0.0;
};

/// U = global_phase * prod_k exp(-i angle_k word_k), product taken left to
/// right in list order.
struct ProductDecomposition {
  int n_sites = 0;
  std::vector<PauliFactor> factors;
  complex global_phase{1.0, 0.0};
};

/// Normalised coefficients Tr(U P)/2^n for each P of a group, in the
/// group's canonical element order.
using ExpansionTable = std::vector<std::pair<PauliString, complex>>;

struct PeelStep {
  std::size_t level = 0;     ///< index of the parent group in the chain
  PauliString word;
  double angle = 0.0;        ///< residual was right-multiplied by exp(+i angle word)
  double w = 0.0;
  double delta = 0.0;
  double norm_before = 0.0;  ///< norm on the child group
  double norm_after = 0.0;
  bool grid_fallback = false;
};

struct PeelTrace {
  std::vector<PeelStep> steps;

  /// True when no accepted step lowered the child-group norm by more than tol.
  bool monotone(double tol = 1e-12) const;
};

struct PeelOptions {
  double peel_tolerance = 1e-9;   ///< on 1 - norm
  double stall_tolerance = 1e-12; ///< on |W|
  int max_steps_per_level = 256;
  int grid_points = 256;          ///< angle grid for the stall fallback
  int max_chain_attempts = 4096;  ///< peel_level calls allowed in the automatic chain search
};

/// Coefficients of U over every element of G.
ExpansionTable expand(const Matrix& u, const PauliGroup& group);

/// sum over G of |Tr(U P)/2^n|^2.
double norm(const Matrix& u, const PauliGroup& group);

/// (1/tau^2) Im sum_r Tr(U R_r) conj(Tr(U D R_r)) over R_r in the child
/// group, tau = 2^n. This is the sin(2 theta) coefficient of the child norm
/// of U exp(i theta D).
double w_value(const Matrix& u, const PauliString& d, const PauliGroup& child);

/// Angle in (-pi/2, pi/2] maximising norm(U exp(i theta D), child). Both
/// branches of the halved arctangent are compared by realised norm; exact
/// ties go to the smaller |theta|. Throws StallError when W and Delta both
/// vanish, and PreconditionError when D lies in the child group.
double optimal_angle(const Matrix& u, const PauliString& d, const PauliGroup& child);

struct PeelLevelResult {
  /// (word, angle) in application order; angles in the exp(+i angle word)
  /// convention used while peeling.
  std::vector<PauliFactor> peels;
  Matrix residual;
};

/// Greedy peeling of U from span(parent) into span(child). Candidates are
/// the words of parent \ child; the one with the largest |W| is applied
/// (ties by canonical order) until the child norm reaches 1. When every
/// |W| is below the stall tolerance an angle-grid search over all
/// candidates takes over; DecompositionError if that also fails.
PeelLevelResult peel_level(const Matrix& u, const PauliGroup& parent, const PauliGroup& child,
                           const PeelOptions& options = {}, PeelTrace* trace = nullptr,
                           std::size_t level = 0);

struct DecompositionResult {
  ProductDecomposition decomposition;
  PeelTrace trace;
  SubgroupChain chain;
};

/// Full recursive decomposition. With a chain, its levels are used as
/// given. Without one, G0 = support_group(U) and each child is chosen
/// during peeling: maximal_subgroup of the parent first, then the other
/// index-two subgroups by descending residual norm, backtracking whenever a
/// level stalls. The final residual is a multiple of the identity and
/// becomes the global phase. `progress`, when given, receives every peel
/// step as it happens (abandoned branches included), so the partial trace
/// survives a DecompositionError; the result's trace holds only the steps
/// of the accepted chain.
DecompositionResult decompose(const Matrix& u, const std::optional<SubgroupChain>& chain = {},
                              const PeelOptions& options = {}, PeelTrace* progress = nullptr);

/// Explicit product for the engineered chain at its mirror time. Pairs of
/// end-to-end words (X Z..Z Y / Y Z..Z X for odd N, X Z..Z X / Y Z..Z Y for
/// even N) are nested from the outside in at angle -s pi/4; odd N adds the
/// alternating X/Y word with I in the middle at angle -s pi/2. The sign s is
/// +1 for N mod 4 in {0, 1} and -1 otherwise. Throws DomainError for N < 2.
ProductDecomposition closed_form(int n_sites);

/// global_phase * prod_k exp(-i angle_k word_k).
Matrix reconstruct(const ProductDecomposition& d);

}  // namespace mirrorchain
