#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mirrorchain/errors.hpp"
#include "mirrorchain/grape.hpp"
#include "mirrorchain/pauli.hpp"
#include "mirrorchain/sampling.hpp"
#include "oracles.hpp"

using namespace mirrorchain;

namespace {

NmrSystemSpec two_spin_zz() {
  auto spec = NmrSystemSpec::independent(2);
  spec.couplings_hz = {{0.0, 10.0}, {10.0, 0.0}};
  return spec;
}

NmrSystemSpec three_spin() {
  auto spec = NmrSystemSpec::independent(3);
  spec.shifts_hz = {120.0, -80.0, 40.0};
  spec.couplings_hz = {{0.0, 60.0, 15.0}, {60.0, 0.0, 45.0}, {15.0, 45.0, 0.0}};
  return spec;
}

PulseSequence random_pulse(int steps, int channels, double dt, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, scale);
  auto p = PulseSequence::zeros(steps, channels, dt);
  for (int k = 0; k < steps; ++k) {
    for (int c = 0; c < channels; ++c) {
      p.amp_x(k, c) = g(rng);
      p.amp_y(k, c) = g(rng);
    }
  }
  return p;
}

}  // namespace

TEST(Drift, ZeroParametersGiveZero) {
  EXPECT_LT(max_abs(drift_hamiltonian(NmrSystemSpec::independent(3))), 1e-15);
}

TEST(Drift, TwoSpinCouplingPattern) {
  const auto h = drift_hamiltonian(two_spin_zz());
  const double a = kPi / 2.0 * 10.0;
  EXPECT_LT(max_abs(h - a * oracle::pauli("ZZ")), 1e-12);
}

TEST(Drift, ShiftsAndCouplingsFromKronecker) {
  const auto spec = three_spin();
  oracle::Mat expect = oracle::Mat::Zero(8, 8);
  for (int i = 1; i <= 3; ++i) expect -= kPi * spec.shifts_hz[static_cast<std::size_t>(i - 1)] * oracle::on_site(3, i, 'Z');
  for (int i = 1; i <= 3; ++i) {
    for (int j = i + 1; j <= 3; ++j) {
      expect += kPi / 2.0 * spec.couplings_hz[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] *
                oracle::pair_op(3, i, 'Z', j, 'Z');
    }
  }
  EXPECT_LT(max_abs(drift_hamiltonian(spec) - expect), 1e-10);
}

TEST(Equilibrium, FluorineProtonWeights) {
  NmrSystemSpec spec = NmrSystemSpec::independent(5);
  spec.channels = {{1, 3, 5}, {2, 4}};
  spec.weights = {0.94, 1.0};
  oracle::Mat expect = 0.94 * (oracle::on_site(5, 1, 'Z') + oracle::on_site(5, 3, 'Z') + oracle::on_site(5, 5, 'Z')) +
                       1.0 * (oracle::on_site(5, 2, 'Z') + oracle::on_site(5, 4, 'Z'));
  EXPECT_LT(max_abs(equilibrium_deviation(spec) - expect), 1e-14);
  EXPECT_LT(max_abs(channel_operator(spec, 1, 'Y') - (oracle::on_site(5, 2, 'Y') + oracle::on_site(5, 4, 'Y'))), 1e-14);
}

TEST(Spec, Validation) {
  auto spec = NmrSystemSpec::independent(2);
  spec.channels = {{1}};
  spec.weights = {1.0};
  EXPECT_THROW(spec.validate(), ValidationError);  // spin 2 has no channel
  spec = NmrSystemSpec::independent(2);
  spec.couplings_hz = {{0.0, 1.0}, {2.0, 0.0}};
  EXPECT_THROW(spec.validate(), ValidationError);  // not symmetric
  spec = NmrSystemSpec::independent(2);
  spec.shifts_hz = {0.0};
  EXPECT_THROW(spec.validate(), DimensionError);
}

TEST(Propagate, ZeroPulseZeroDriftIsIdentity) {
  const auto p = PulseSequence::zeros(5, 2, 1e-3);
  EXPECT_LT(max_abs(propagate(NmrSystemSpec::independent(2), p) - Matrix::Identity(4, 4)), 1e-14);
  const auto none = PulseSequence::zeros(0, 2, 1e-3);
  EXPECT_LT(max_abs(propagate(two_spin_zz(), none) - Matrix::Identity(4, 4)), 1e-15);
}

TEST(Propagate, ConstantXAmplitudeIsCollectiveRotation) {
  const double omega = 37.0;
  const int steps = 4;
  const double dt = 2e-3;
  auto p = PulseSequence::zeros(steps, 1, dt);
  p.amp_x.setConstant(omega);
  NmrSystemSpec spec = NmrSystemSpec::independent(2);
  spec.channels = {{1, 2}};
  spec.weights = {1.0};
  const double angle = kPi * omega * steps * dt;
  const oracle::Mat x1 = oracle::single('I') * std::cos(angle) - oracle::cd(0, 1) * std::sin(angle) * oracle::single('X');
  EXPECT_LT(max_abs(propagate(spec, p) - oracle::kron(x1, x1)), 1e-12);
}

TEST(Propagate, IsUnitary) {
  std::mt19937_64 rng(51);
  const auto p = random_pulse(7, 3, 1e-3, 200.0, rng);
  EXPECT_TRUE(is_unitary(propagate(three_spin(), p)));
}

TEST(FidelityHs, TrivialCases) {
  const auto x = pauli_matrix(PauliString::parse("XZ"));
  EXPECT_NEAR(fidelity_hs(x, x), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_hs(x, pauli_matrix(PauliString::parse("ZZ"))), 0.0, 1e-15);
  EXPECT_NEAR(fidelity_hs(x, std::polar(1.0, 0.7) * x), 1.0, 1e-15);
  EXPECT_THROW(fidelity_hs(x, Matrix::Identity(2, 2)), DimensionError);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(52);
  Sampler s(3);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 1 + trial;
    auto spec = trial == 2 ? three_spin() : NmrSystemSpec::independent(n);
    if (trial == 1) spec = two_spin_zz();
    const auto target = reconstruct(s.pauli_product(n, 3));
    const auto p = random_pulse(6 + trial, n, 1e-3, 150.0, rng);
    const std::vector<double> scales{0.95, 1.0, 1.05};
    const auto g = grape_gradient(spec, target, p, scales);
    EXPECT_NEAR(g.value, grape_objective(spec, target, p, scales), 1e-13);
    const double h = 1e-4;
    for (int k = 0; k < p.steps(); ++k) {
      for (int c = 0; c < p.channels(); ++c) {
        for (int axis = 0; axis < 2; ++axis) {
          auto plus = p;
          auto minus = p;
          (axis == 0 ? plus.amp_x : plus.amp_y)(k, c) += h;
          (axis == 0 ? minus.amp_x : minus.amp_y)(k, c) -= h;
          const double fd = (grape_objective(spec, target, plus, scales) -
                             grape_objective(spec, target, minus, scales)) / (2.0 * h);
          const double an = (axis == 0 ? g.grad_x : g.grad_y)(k, c);
          EXPECT_LE(std::abs(fd - an), 1e-5 * std::max(std::abs(fd), 1e-3)) << trial << " " << k << " " << c;
        }
      }
    }
  }
}

TEST(Objective, SingleScaleIsPlainFidelity) {
  std::mt19937_64 rng(53);
  const auto spec = three_spin();
  const auto target = pauli_exponential(PauliString::parse("XYZ"), 0.4);
  const auto p = random_pulse(5, 3, 1e-3, 100.0, rng);
  EXPECT_DOUBLE_EQ(grape_objective(spec, target, p, {1.0}), fidelity_hs(target, propagate(spec, p)));
}

TEST(Optimize, IdentityTargetNeedsNoIterations) {
  GrapeConfig cfg;
  const auto r = grape_optimize(NmrSystemSpec::independent(1), Matrix::Identity(2, 2), cfg);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-15);
  EXPECT_TRUE(r.converged);
}

TEST(Optimize, SingleSpinXGate) {
  GrapeConfig cfg;
  cfg.rf_scales = {1.0};
  const auto r = grape_optimize(NmrSystemSpec::independent(1), pauli_matrix(PauliString::parse("X")), cfg);
  EXPECT_GE(r.fidelity, 0.9999);
  EXPECT_TRUE(r.random_restart);
  EXPECT_LE(r.pulse.peak_amplitude(), cfg.amplitude_cap_hz + 1e-9);
}

TEST(Optimize, TwoSpinFreeEvolution) {
  GrapeConfig cfg;
  cfg.steps = 10;
  cfg.dt = 1.0 / 20.0 / 10.0;
  const auto r = grape_optimize(two_spin_zz(), pauli_exponential(PauliString::parse("ZZ"), kPi / 4.0), cfg);
  EXPECT_GE(r.fidelity, 0.99);
}

TEST(Optimize, TrajectoryNeverDecreases) {
  GrapeConfig cfg;
  cfg.max_iterations = 40;
  cfg.steps = 10;
  const auto r = grape_optimize(three_spin(), pauli_exponential(PauliString::parse("XIY"), 0.9), cfg);
  ASSERT_EQ(r.trajectory.size(), static_cast<std::size_t>(r.iterations + 1));
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) EXPECT_GE(r.trajectory[i], r.trajectory[i - 1]);
  EXPECT_GE(r.fidelity, 0.0);
  EXPECT_LE(r.fidelity, 1.0 + 1e-12);
}

TEST(Optimize, InfeasibleUnderTightCap) {
  GrapeConfig cfg;
  cfg.steps = 1;
  cfg.amplitude_cap_hz = 10.0;
  const auto r = grape_optimize(NmrSystemSpec::independent(1), pauli_matrix(PauliString::parse("X")), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_LT(r.fidelity, 0.99);
}

TEST(Optimize, SeededRunsAreIdentical) {
  GrapeConfig cfg;
  cfg.max_iterations = 15;
  const auto target = pauli_matrix(PauliString::parse("Y"));
  const auto a = grape_optimize(NmrSystemSpec::independent(1), target, cfg);
  const auto b = grape_optimize(NmrSystemSpec::independent(1), target, cfg);
  EXPECT_EQ(a.pulse.amp_x, b.pulse.amp_x);
  EXPECT_EQ(a.trajectory, b.trajectory);
}

TEST(Optimize, RejectsMismatchedTarget) {
  EXPECT_THROW(grape_optimize(NmrSystemSpec::independent(2), Matrix::Identity(2, 2), GrapeConfig{}), DimensionError);
}
