#pragma once

#include <cstdint>
#include <vector>

#include "mirrorchain/linalg.hpp"

namespace mirrorchain {

/// Spin system under a weak-coupling (ZZ) drift in the rotating frame.
struct NmrSystemSpec {
  int n_spins = 0;
  std::vector<double> shifts_hz;                  ///< nu_i
  std::vector<std::vector<double>> couplings_hz;  ///< J_ij + 2 D_ij, symmetric, zero diagonal
  std::vector<std::vector<int>> channels;         ///< 1-based spins per RF channel; a partition
  std::vector<double> weights;                    ///< gyromagnetic weight per channel

  /// One channel per spin, unit weights, zero shifts and couplings.
  static NmrSystemSpec independent(int n_spins);

  /// Throws DimensionError / ValidationError on malformed specs.
  void validate() const;
  int n_channels() const { return static_cast<int>(channels.size()); }
};

/// Piecewise-constant controls: amp_x/amp_y are steps x channels, in Hz.
struct PulseSequence {
  double dt = 0.0;  ///< seconds per step
  Eigen::MatrixXd amp_x;
  Eigen::MatrixXd amp_y;

  static PulseSequence zeros(int steps, int channels, double dt);
  int steps() const { return static_cast<int>(amp_x.rows()); }
  int channels() const { return static_cast<int>(amp_x.cols()); }
  double duration() const { return dt * steps(); }
  /// Largest sqrt(ax^2 + ay^2) over steps and channels.
  double peak_amplitude() const;
};

struct GrapeConfig {
  int steps = 20;
  double dt = 1e-3;
  double amplitude_cap_hz = 1000.0;  ///< radial cap per channel per step
  int max_iterations = 200;
  std::vector<double> rf_scales{0.95, 1.0, 1.05};
  std::uint64_t seed = 1;
  double target_fidelity = 1.0 - 1e-5;  ///< stop once reached
  int max_line_search = 40;
};

struct GrapeResult {
  PulseSequence pulse;
  double fidelity = 0.0;
  int iterations = 0;
  std::vector<double> trajectory;  ///< objective after each accepted step, starting at iteration 0
  bool converged = false;          ///< target_fidelity reached
  bool random_restart = false;     ///< zero start had no gradient and was perturbed
};

/// -pi sum nu_i Z_i + (pi/2) sum_{i<j} C_ij Z_i Z_j (diagonal).
Matrix drift_hamiltonian(const NmrSystemSpec& spec);

/// sum over channels of weight * sum_{s in channel} Z_s.
Matrix equilibrium_deviation(const NmrSystemSpec& spec);

/// Collective control operator weight_c * sum_{s in c} sigma^{x|y}_s.
Matrix channel_operator(const NmrSystemSpec& spec, int channel, char axis);

/// Step Hamiltonian: drift + pi * scale * sum_c (ax X_c + ay Y_c).
Matrix step_hamiltonian(const NmrSystemSpec& spec, const PulseSequence& pulse, int step,
                        double rf_scale = 1.0);

/// U_T ... U_1 with U_k = exp(-i H_k dt). Zero steps give the identity.
Matrix propagate(const NmrSystemSpec& spec, const PulseSequence& pulse, double rf_scale = 1.0);

/// |Tr(U^dag V)| / dim.
double fidelity_hs(const Matrix& u, const Matrix& v);

struct ObjectiveGradient {
  double value = 0.0;        ///< mean over scales of |Tr(T^dag U_s)|/dim
  Eigen::MatrixXd grad_x;    ///< d value / d amp_x, steps x channels
  Eigen::MatrixXd grad_y;
};

/// Objective and its exact gradient. Each step's derivative uses the
/// eigendecomposition of H_k, so there is no small-dt approximation.
ObjectiveGradient grape_gradient(const NmrSystemSpec& spec, const Matrix& target,
                                 const PulseSequence& pulse, const std::vector<double>& rf_scales);

/// Objective value only.
double grape_objective(const NmrSystemSpec& spec, const Matrix& target, const PulseSequence& pulse,
                       const std::vector<double>& rf_scales);

/// Projected gradient ascent with backtracking from zero controls.
GrapeResult grape_optimize(const NmrSystemSpec& spec, const Matrix& target, const GrapeConfig& config);

}  // namespace mirrorchain
