#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mirrorchain/chain.hpp"
#include "mirrorchain/errors.hpp"
#include "mirrorchain/mirror.hpp"
#include "mirrorchain/pauli.hpp"
#include "oracles.hpp"

using namespace mirrorchain;

namespace {

// Bell vectors in index order. Complementing every bit maps each of the
// four Bell projectors to itself, so label and index order agree here.
oracle::Vec bell(int which) {
  oracle::Vec v = oracle::Vec::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  switch (which) {
    case 0: v(0) = r; v(3) = r; break;   // phi+
    case 1: v(0) = r; v(3) = -r; break;  // phi-
    case 2: v(1) = r; v(2) = r; break;   // psi+
    default: v(1) = r; v(2) = -r; break; // psi-
  }
  return v;
}

// Pair (1,2) in `pair`, every other site empty (index bit 1).
oracle::Vec chain_state(int n, const oracle::Vec& pair) {
  oracle::Vec full = oracle::Vec::Zero(Eigen::Index{1} << n);
  const std::size_t rest = (std::size_t{1} << (n - 2)) - 1;
  for (std::size_t b = 0; b < 4; ++b) {
    full(static_cast<Eigen::Index>((b << (n - 2)) | rest)) = pair(static_cast<Eigen::Index>(b));
  }
  return full;
}

}  // namespace

TEST(PartialTrace, MatchesExplicitSummation) {
  std::mt19937_64 rng(41);
  const auto a = oracle::random_matrix(16, 16, rng);
  const oracle::Mat rho = a * a.adjoint();
  EXPECT_LT(max_abs(partial_trace(rho, 4, {2, 4}) - oracle::reduce_pair(rho, 4, 2, 4)), 1e-12);
  EXPECT_LT(max_abs(partial_trace(rho, 4, {4, 2}) - oracle::reduce_pair(rho, 4, 4, 2)), 1e-12);
  EXPECT_NEAR(std::abs(partial_trace(rho, 4, {}).trace() - rho.trace()), 0.0, 1e-12);
  EXPECT_THROW(partial_trace(rho, 4, {5}), DomainError);
}

TEST(PartialTrace, ProductStateFactorises) {
  const oracle::Mat a = oracle::single('X') + 2.0 * oracle::single('I');
  const oracle::Mat b = oracle::single('Z') + 3.0 * oracle::single('I');
  const auto r = partial_trace(oracle::kron(a, b), 2, {1});
  EXPECT_LT(max_abs(r - a * b.trace()), 1e-14);
}

TEST(SectorPhases, CommonPhasePerExcitationNumber) {
  for (int n = 2; n <= 10; ++n) {
    const auto phases = sector_phases(engineered_mirror_unitary(n));
    ASSERT_EQ(phases.size(), static_cast<std::size_t>(n + 1));
    for (const auto& p : phases) EXPECT_NEAR(std::abs(p), 1.0, 1e-9);
  }
}

TEST(SectorPhases, FiveSiteRatios) {
  const auto p = sector_phases(engineered_mirror_unitary(5));
  EXPECT_LT(std::abs(p[1] / p[0] - 1.0), 1e-9);
  EXPECT_LT(std::abs(p[2] / p[0] + 1.0), 1e-9);
}

TEST(SectorPhases, RejectsImperfectTransfer) {
  try {
    sector_phases(chain_propagator(ChainSpec::uniform(3), kPi / 2.0));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("100"), std::string::npos) << e.what();
  }
}

TEST(Metrics, FidelityAndCorrelation) {
  const oracle::Mat x = oracle::single('X');
  EXPECT_NEAR(fidelity_metric(x, x), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_metric(x, 0.5 * x), 1.0, 1e-15);
  EXPECT_NEAR(attenuated_correlation(x, 0.5 * x), 0.5, 1e-15);
  EXPECT_NEAR(fidelity_metric(x, -x), -1.0, 1e-15);
  EXPECT_NEAR(fidelity_metric(x, oracle::single('Z')), 0.0, 1e-15);
  EXPECT_THROW(fidelity_metric(Matrix::Zero(2, 2), x), MetricError);
  EXPECT_THROW(attenuated_correlation(Matrix::Zero(2, 2), x), MetricError);
}

TEST(Bell, NamesAndVectors) {
  for (const char* name : {"phi+", "phi-", "psi+", "psi-"}) EXPECT_EQ(bell_name(parse_bell(name)), name);
  EXPECT_THROW(parse_bell("phi"), ParseError);
  EXPECT_THROW(parse_mode("mixed"), ParseError);
  const BellKind kinds[] = {BellKind::kPhiPlus, BellKind::kPhiMinus, BellKind::kPsiPlus, BellKind::kPsiMinus};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double overlap = std::abs(bell_vector(kinds[i]).dot(bell_vector(kinds[j])));
      EXPECT_NEAR(overlap, i == j ? 1.0 : 0.0, 1e-15);
    }
    const oracle::Vec o = bell(i);
    EXPECT_NEAR(std::abs(o.dot(bell_vector(kinds[i]))), 1.0, 1e-15);
  }
}

TEST(Bell, IdentifyRejectsProductStates) {
  Vector v = Vector::Zero(4);
  v(0) = 1.0;
  const auto m = identify_bell(v * v.adjoint());
  EXPECT_FALSE(m.kind.has_value());
  EXPECT_NEAR(m.overlap, 0.5, 1e-15);
  const auto b = identify_bell(bell_vector(BellKind::kPsiMinus) * bell_vector(BellKind::kPsiMinus).adjoint());
  ASSERT_TRUE(b.kind.has_value());
  EXPECT_EQ(*b.kind, BellKind::kPsiMinus);
}

TEST(Transfer, BellSignsMatchDirectSimulation) {
  const auto spec = ChainSpec::engineered(5);
  const oracle::Mat u = oracle::expm(oracle::cd(0, -kPi / 2.0) * oracle::xy_hamiltonian(5, spec.couplings, spec.fields));
  struct Case {
    int in;
    int out;
    BellKind kind;
    const char* name;
  };
  for (const Case& c : {Case{0, 1, BellKind::kPhiPlus, "phi-"}, Case{2, 2, BellKind::kPsiPlus, "psi+"}}) {
    const oracle::Vec psi = u * chain_state(5, bell(c.in));
    const oracle::Mat reduced = oracle::reduce_pair(psi * psi.adjoint(), 5, 4, 5);
    const double direct = (bell(c.out).adjoint() * reduced * bell(c.out))(0, 0).real();
    EXPECT_NEAR(direct, 1.0, 1e-9);
    for (auto mode : {TransferMode::kPure, TransferMode::kDeviation}) {
      const auto r = transfer_entangled(spec, {1, 2}, c.kind, mode);
      EXPECT_GE(r.fidelity, 1.0 - 1e-9);
      ASSERT_TRUE(r.bell_output.has_value());
      EXPECT_EQ(*r.bell_output, c.name);
      EXPECT_EQ(r.destination_sites, (std::vector<int>{4, 5}));
      if (mode == TransferMode::kDeviation) {
        ASSERT_TRUE(r.spectators_maximally_mixed.has_value());
        EXPECT_TRUE(*r.spectators_maximally_mixed);
      }
    }
  }
}

TEST(Transfer, ReversedPairIsHandled) {
  const auto r = transfer_entangled(ChainSpec::engineered(5), {2, 1}, BellKind::kPhiPlus, TransferMode::kPure);
  EXPECT_GE(r.fidelity, 1.0 - 1e-9);
  EXPECT_THROW(transfer_entangled(ChainSpec::engineered(5), {2, 2}, BellKind::kPhiPlus, TransferMode::kPure),
               DomainError);
}

TEST(Transfer, SingleSitePureDesign) {
  for (int n : {2, 5, 8}) {
    const auto spec = ChainSpec::engineered(n);
    for (const auto& name : six_state_design()) {
      const auto r = transfer_single(spec, 1, single_site_state(name), TransferMode::kPure);
      EXPECT_GE(r.fidelity, 1.0 - 1e-9) << n << " " << name;
      EXPECT_EQ(r.destination_sites, std::vector<int>{n});
    }
  }
}

TEST(Transfer, MiddleSiteOfOddChain) {
  const auto r = transfer_single(ChainSpec::engineered(5), 3, single_site_state("1"), TransferMode::kPure);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  EXPECT_EQ(r.destination_sites, std::vector<int>{3});
}

TEST(Transfer, SingleSiteDeviationDecodesAntiPhase) {
  for (int n : {3, 5, 8}) {
    const auto spec = ChainSpec::engineered(n);
    for (char axis : {'X', 'Y', 'Z'}) {
      const auto r = transfer_single(spec, 1, oracle::single(axis), TransferMode::kDeviation);
      EXPECT_GE(r.fidelity, 1.0 - 1e-9) << n << axis;
      EXPECT_TRUE(r.anti_phase_decoded);
    }
  }
}

TEST(Transfer, SiteOutOfRange) {
  EXPECT_THROW(transfer_single(ChainSpec::engineered(4), 5, single_site_state("1"), TransferMode::kPure),
               DomainError);
  EXPECT_THROW(single_site_state("+w"), ParseError);
}

TEST(Heisenberg, EndSiteXBecomesAntiPhaseString) {
  const auto u = engineered_mirror_unitary(5);
  const Matrix out = u * pauli_matrix(PauliString::parse("XIIII")) * u.adjoint();
  EXPECT_LT(max_abs(out - oracle::pauli("ZZZZX")), 1e-9);
}
