#include "mirrorchain/grape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mirrorchain/errors.hpp"
#include "mirrorchain/pauli.hpp"
#include "mirrorchain/sampling.hpp"

namespace mirrorchain {

namespace {

struct StepEigen {
  RealVector values;
  Matrix vectors;
  Matrix unitary;
};

StepEigen diagonalise_step(const Matrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
  StepEigen out{solver.eigenvalues(), solver.eigenvectors(), {}};
  const Vector phases = (-kI * dt * out.values.cast<complex>()).array().exp().matrix();
  out.unitary = out.vectors * phases.asDiagonal() * out.vectors.adjoint();
  return out;
}

// Divided differences of exp(-i lambda dt): the Frechet derivative of the step
// exponential in the eigenbasis is (V^dag E V) .* gamma.
Matrix divided_differences(const RealVector& lambda, double dt) {
  const Eigen::Index d = lambda.size();
  Matrix gamma(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const complex ea = std::exp(-kI * lambda(a) * dt);
    for (Eigen::Index b = 0; b < d; ++b) {
      const double gap = lambda(a) - lambda(b);
      if (std::abs(gap) * dt < 1e-8) {
        gamma(a, b) = -kI * dt * ea;
      } else {
        gamma(a, b) = (ea - std::exp(-kI * lambda(b) * dt)) / gap;
      }
    }
  }
  return gamma;
}

void check_target(const NmrSystemSpec& spec, const Matrix& target) {
  if (target.rows() != target.cols() || target.rows() != (Eigen::Index{1} << spec.n_spins)) {
    throw DimensionError("target dimension does not match the spin system");
  }
}

void check_pulse(const NmrSystemSpec& spec, const PulseSequence& pulse) {
  if (pulse.amp_y.rows() != pulse.amp_x.rows() || pulse.amp_y.cols() != pulse.amp_x.cols()) {
    throw DimensionError("x and y amplitude tables differ in shape");
  }
  if (pulse.steps() > 0 && pulse.channels() != spec.n_channels()) {
    throw DimensionError("pulse has " + std::to_string(pulse.channels()) + " channels, system has " +
                         std::to_string(spec.n_channels()));
  }
  if (!(pulse.dt >= 0.0)) throw DomainError("pulse step duration must be non-negative");
}

void project(PulseSequence& pulse, double cap) {
  for (int k = 0; k < pulse.steps(); ++k) {
    for (int c = 0; c < pulse.channels(); ++c) {
      const double r = std::hypot(pulse.amp_x(k, c), pulse.amp_y(k, c));
      if (r > cap) {
        pulse.amp_x(k, c) *= cap / r;
        pulse.amp_y(k, c) *= cap / r;
      }
    }
  }
}

}  // namespace

NmrSystemSpec NmrSystemSpec::independent(int n_spins) {
  NmrSystemSpec spec;
  spec.n_spins = n_spins;
  spec.shifts_hz.assign(static_cast<std::size_t>(n_spins), 0.0);
  spec.couplings_hz.assign(static_cast<std::size_t>(n_spins),
                           std::vector<double>(static_cast<std::size_t>(n_spins), 0.0));
  for (int s = 1; s <= n_spins; ++s) spec.channels.push_back({s});
  spec.weights.assign(static_cast<std::size_t>(n_spins), 1.0);
  return spec;
}

void NmrSystemSpec::validate() const {
  if (n_spins < 1) throw DomainError("spin system needs at least one spin");
  require_dense_size(n_spins);
  const auto n = static_cast<std::size_t>(n_spins);
  if (shifts_hz.size() != n) throw DimensionError("shifts_hz must have one entry per spin");
  if (couplings_hz.size() != n) throw DimensionError("couplings_hz must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    if (couplings_hz[i].size() != n) throw DimensionError("couplings_hz must be n x n");
    if (couplings_hz[i][i] != 0.0) throw ValidationError("couplings_hz must have a zero diagonal");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(couplings_hz[i][j] - couplings_hz[j][i]) > 1e-12) {
        throw ValidationError("couplings_hz must be symmetric");
      }
    }
  }
  if (weights.size() != channels.size()) throw DimensionError("weights must have one entry per channel");
  std::vector<int> owner(n, 0);
  for (const auto& ch : channels) {
    if (ch.empty()) throw ValidationError("empty RF channel");
    for (const int s : ch) {
      if (s < 1 || s > n_spins) throw ValidationError("channel spin index out of range");
      if (owner[static_cast<std::size_t>(s - 1)]++ > 0) {
        throw ValidationError("spin " + std::to_string(s) + " appears in more than one channel");
      }
    }
  }
  if (std::find(owner.begin(), owner.end(), 0) != owner.end()) {
    throw ValidationError("channels must cover every spin");
  }
}

PulseSequence PulseSequence::zeros(int steps, int channels, double dt) {
  if (steps < 0 || channels < 0) throw DomainError("negative pulse shape");
  PulseSequence p;
  p.dt = dt;
  p.amp_x = Eigen::MatrixXd::Zero(steps, channels);
  p.amp_y = Eigen::MatrixXd::Zero(steps, channels);
  return p;
}

double PulseSequence::peak_amplitude() const {
  if (amp_x.size() == 0) return 0.0;
  return (amp_x.array().square() + amp_y.array().square()).sqrt().maxCoeff();
}

Matrix drift_hamiltonian(const NmrSystemSpec& spec) {
  spec.validate();
  const int n = spec.n_spins;
  const std::uint64_t dim = std::uint64_t{1} << n;
  Vector diag = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::uint64_t c = 0; c < dim; ++c) {
    auto z = [&](int s) { return ((c >> (n - 1 - s)) & 1U) ? -1.0 : 1.0; };
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      e -= kPi * spec.shifts_hz[static_cast<std::size_t>(i)] * z(i);
      for (int j = i + 1; j < n; ++j) {
        e += 0.5 * kPi * spec.couplings_hz[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * z(i) * z(j);
      }
    }
    diag(static_cast<Eigen::Index>(c)) = e;
  }
  return diag.asDiagonal();
}

Matrix equilibrium_deviation(const NmrSystemSpec& spec) {
  spec.validate();
  const Eigen::Index dim = Eigen::Index{1} << spec.n_spins;
  Matrix rho = Matrix::Zero(dim, dim);
  for (int c = 0; c < spec.n_channels(); ++c) {
    for (const int s : spec.channels[static_cast<std::size_t>(c)]) {
      rho += spec.weights[static_cast<std::size_t>(c)] * pauli_matrix(PauliString::single(spec.n_spins, s, 'Z'));
    }
  }
  return rho;
}

Matrix channel_operator(const NmrSystemSpec& spec, int channel, char axis) {
  if (channel < 0 || channel >= spec.n_channels()) throw DomainError("channel index out of range");
  if (axis != 'X' && axis != 'Y') throw DomainError("control axis must be X or Y");
  const Eigen::Index dim = Eigen::Index{1} << spec.n_spins;
  Matrix op = Matrix::Zero(dim, dim);
  for (const int s : spec.channels[static_cast<std::size_t>(channel)]) {
    op += pauli_matrix(PauliString::single(spec.n_spins, s, axis));
  }
  return spec.weights[static_cast<std::size_t>(channel)] * op;
}

Matrix step_hamiltonian(const NmrSystemSpec& spec, const PulseSequence& pulse, int step, double rf_scale) {
  Matrix h = drift_hamiltonian(spec);
  for (int c = 0; c < spec.n_channels(); ++c) {
    const double ax = pulse.amp_x(step, c);
    const double ay = pulse.amp_y(step, c);
    if (ax != 0.0) h += (kPi * rf_scale * ax) * channel_operator(spec, c, 'X');
    if (ay != 0.0) h += (kPi * rf_scale * ay) * channel_operator(spec, c, 'Y');
  }
  return h;
}

Matrix propagate(const NmrSystemSpec& spec, const PulseSequence& pulse, double rf_scale) {
  spec.validate();
  check_pulse(spec, pulse);
  const Eigen::Index dim = Eigen::Index{1} << spec.n_spins;
  Matrix u = Matrix::Identity(dim, dim);
  for (int k = 0; k < pulse.steps(); ++k) {
    u = diagonalise_step(step_hamiltonian(spec, pulse, k, rf_scale), pulse.dt).unitary * u;
  }
  return u;
}

double fidelity_hs(const Matrix& u, const Matrix& v) { return unitary_fidelity(u, v); }

double grape_objective(const NmrSystemSpec& spec, const Matrix& target, const PulseSequence& pulse,
                       const std::vector<double>& rf_scales) {
  check_target(spec, target);
  if (rf_scales.empty()) throw DomainError("RF scale set is empty");
  std::vector<double> values(rf_scales.size());
  parallel_for(rf_scales.size(), [&](std::size_t i) {
    values[i] = fidelity_hs(target, propagate(spec, pulse, rf_scales[i]));
  });
  double total = 0.0;
  for (const double v : values) total += v;
  return total / static_cast<double>(rf_scales.size());
}

ObjectiveGradient grape_gradient(const NmrSystemSpec& spec, const Matrix& target,
                                 const PulseSequence& pulse, const std::vector<double>& rf_scales) {
  spec.validate();
  check_pulse(spec, pulse);
  check_target(spec, target);
  if (rf_scales.empty()) throw DomainError("RF scale set is empty");

  const int steps = pulse.steps();
  const int channels = spec.n_channels();
  const Eigen::Index dim = target.rows();
  const double d = static_cast<double>(dim);

  std::vector<Matrix> controls;
  for (int c = 0; c < channels; ++c) {
    controls.push_back(channel_operator(spec, c, 'X'));
    controls.push_back(channel_operator(spec, c, 'Y'));
  }

  struct ScaleResult {
    double value = 0.0;
    Eigen::MatrixXd gx, gy;
  };
  std::vector<ScaleResult> per_scale(rf_scales.size());

  parallel_for(rf_scales.size(), [&](std::size_t si) {
    const double scale = rf_scales[si];
    std::vector<StepEigen> eig;
    eig.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
      eig.push_back(diagonalise_step(step_hamiltonian(spec, pulse, k, scale), pulse.dt));
    }
    // forward[k] = U_k ... U_1 (forward[0] = 1); backward[k] = U_T ... U_{k+1}.
    std::vector<Matrix> forward(static_cast<std::size_t>(steps + 1));
    forward[0] = Matrix::Identity(dim, dim);
    for (int k = 0; k < steps; ++k) forward[k + 1] = eig[k].unitary * forward[k];
    std::vector<Matrix> backward(static_cast<std::size_t>(steps + 1));
    backward[steps] = Matrix::Identity(dim, dim);
    for (int k = steps - 1; k >= 0; --k) backward[k] = backward[k + 1] * eig[k].unitary;

    ScaleResult& r = per_scale[si];
    r.gx = Eigen::MatrixXd::Zero(steps, channels);
    r.gy = Eigen::MatrixXd::Zero(steps, channels);
    const complex g = (target.adjoint() * forward[steps]).trace() / d;
    r.value = std::abs(g);
    if (r.value <= 1e-300) return;  // |g| is not differentiable at zero
    const complex unit = std::conj(g) / r.value;

    for (int k = 0; k < steps; ++k) {
      // g = Tr(T^dag B_k U_k F_{k-1}) / d, so dg = Tr(L dU_k) / d with
      // L = F_{k-1} T^dag B_k.
      const Matrix& v = eig[k].vectors;
      const Matrix lambda = v.adjoint() * forward[k] * target.adjoint() * backward[k + 1] * v;
      const Matrix gamma = divided_differences(eig[k].values, pulse.dt);
      const Matrix weighted = lambda.transpose().cwiseProduct(gamma);
      for (int c = 0; c < channels; ++c) {
        for (int axis = 0; axis < 2; ++axis) {
          const Matrix e = (kPi * scale) * (v.adjoint() * controls[static_cast<std::size_t>(2 * c + axis)] * v);
          const complex dg = weighted.cwiseProduct(e).sum() / d;
          const double dv = (unit * dg).real();
          (axis == 0 ? r.gx : r.gy)(k, c) = dv;
        }
      }
    }
  });

  ObjectiveGradient out;
  out.grad_x = Eigen::MatrixXd::Zero(steps, channels);
  out.grad_y = Eigen::MatrixXd::Zero(steps, channels);
  for (const auto& r : per_scale) {
    out.value += r.value;
    out.grad_x += r.gx;
    out.grad_y += r.gy;
  }
  const double inv = 1.0 / static_cast<double>(rf_scales.size());
  out.value *= inv;
  out.grad_x *= inv;
  out.grad_y *= inv;
  return out;
}

GrapeResult grape_optimize(const NmrSystemSpec& spec, const Matrix& target, const GrapeConfig& config) {
  spec.validate();
  check_target(spec, target);
  require_unitary(target, 1e-8);
  if (config.steps < 0 || !(config.dt > 0.0)) throw DomainError("GRAPE needs steps >= 0 and dt > 0");
  if (!(config.amplitude_cap_hz >= 0.0)) throw DomainError("amplitude cap must be non-negative");

  GrapeResult result;
  PulseSequence pulse = PulseSequence::zeros(config.steps, spec.n_channels(), config.dt);
  ObjectiveGradient state = grape_gradient(spec, target, pulse, config.rf_scales);

  auto grad_norm = [](const ObjectiveGradient& s) {
    return std::sqrt(s.grad_x.squaredNorm() + s.grad_y.squaredNorm());
  };

  if (state.value < config.target_fidelity && grad_norm(state) <= 1e-12 && config.steps > 0 &&
      config.amplitude_cap_hz > 0.0) {
    // Zero controls sit on a critical point; restart from seeded noise.
    Sampler rng(config.seed);
    const double half = 0.5 * config.amplitude_cap_hz;
    for (int k = 0; k < pulse.steps(); ++k) {
      for (int c = 0; c < pulse.channels(); ++c) {
        pulse.amp_x(k, c) = rng.uniform(-half, half);
        pulse.amp_y(k, c) = rng.uniform(-half, half);
      }
    }
    project(pulse, config.amplitude_cap_hz);
    state = grape_gradient(spec, target, pulse, config.rf_scales);
    result.random_restart = true;
  }
  result.trajectory.push_back(state.value);

  const double gn = grad_norm(state);
  double alpha = gn > 0.0 ? 0.1 * config.amplitude_cap_hz / gn : 0.0;
  int iteration = 0;
  while (state.value < config.target_fidelity && iteration < config.max_iterations && alpha > 0.0) {
    bool accepted = false;
    PulseSequence candidate;
    double value = 0.0;
    for (int ls = 0; ls < config.max_line_search; ++ls) {
      candidate = pulse;
      candidate.amp_x += alpha * state.grad_x;
      candidate.amp_y += alpha * state.grad_y;
      project(candidate, config.amplitude_cap_hz);
      value = grape_objective(spec, target, candidate, config.rf_scales);
      if (value > state.value) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    // Keep doubling along the same gradient while the objective improves.
    for (int grow = 0; grow < config.max_line_search; ++grow) {
      PulseSequence longer = pulse;
      longer.amp_x += 2.0 * alpha * state.grad_x;
      longer.amp_y += 2.0 * alpha * state.grad_y;
      project(longer, config.amplitude_cap_hz);
      const double longer_value = grape_objective(spec, target, longer, config.rf_scales);
      if (longer_value <= value) break;
      alpha *= 2.0;
      candidate = std::move(longer);
      value = longer_value;
    }
    ++iteration;
    pulse = std::move(candidate);
    state = grape_gradient(spec, target, pulse, config.rf_scales);
    result.trajectory.push_back(state.value);
  }

  result.pulse = std::move(pulse);
  result.fidelity = state.value;
  result.iterations = iteration;
  result.converged = state.value >= config.target_fidelity;
  return result;
}

}  // namespace mirrorchain
