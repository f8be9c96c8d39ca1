#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mirrorchain/chain.hpp"
#include "mirrorchain/decomposition.hpp"
#include "mirrorchain/errors.hpp"
#include "mirrorchain/sampling.hpp"
#include "oracles.hpp"

using namespace mirrorchain;

namespace {

PauliGroup closure(int n, std::initializer_list<const char*> list) {
  std::vector<PauliString> seed;
  for (const char* w : list) seed.push_back(PauliString::parse(w));
  return group_closure(n, seed);
}

SubgroupChain four_site_chain() {
  return SubgroupChain({support_group(engineered_mirror_unitary(4)),
                        closure(4, {"IXXI", "IYYI", "XXXX", "XIIX"}), closure(4, {"IXXI", "IYYI"}),
                        closure(4, {"IXXI"}), PauliGroup(4)});
}

// Dense oracle for the product of exponentials.
oracle::Mat dense_product(const ProductDecomposition& d) {
  const auto dim = Eigen::Index{1} << d.n_sites;
  oracle::Mat u = oracle::Mat::Identity(dim, dim);
  for (const auto& f : d.factors) u = u * oracle::expm(oracle::cd(0, -f.angle) * oracle::pauli(f.word.str()));
  return d.global_phase * u;
}

double dense_norm(const oracle::Mat& u, const PauliGroup& g) {
  double total = 0.0;
  const double d = static_cast<double>(u.rows());
  for (const auto& p : g.elements()) total += std::norm((u * oracle::pauli(p.str())).trace() / d);
  return total;
}

}  // namespace

TEST(Norm, FullBasisIsOneAndTrivialGroupIsTraceSquared) {
  std::mt19937_64 rng(31);
  const auto u = oracle::random_unitary(8, rng);
  PauliGroup all(3);
  for (const char* w : {"XII", "ZII", "IXI", "IZI", "IIX", "IIZ"}) all.add(PauliString::parse(w));
  EXPECT_NEAR(norm(u, all), 1.0, 1e-12);
  EXPECT_NEAR(norm(u, PauliGroup(3)), std::norm(u.trace() / 8.0), 1e-14);
  EXPECT_THROW(norm(u, PauliGroup(2)), DimensionError);
}

TEST(Expand, CoefficientsReconstructOperator) {
  const auto u = engineered_mirror_unitary(4);
  const auto g = support_group(u);
  Matrix rebuilt = Matrix::Zero(16, 16);
  for (const auto& [p, c] : expand(u, g)) rebuilt += c * oracle::pauli(p.str());
  EXPECT_LT(max_abs(rebuilt - u), 1e-12);
}

TEST(WValue, FirstPeelOfFourSiteChain) {
  const auto chain = four_site_chain();
  const auto u = engineered_mirror_unitary(4);
  EXPECT_NEAR(norm(u, chain[1]), 0.5, 1e-12);
  std::map<std::string, double> w;
  for (const auto& d : chain[0].elements()) {
    if (!chain[1].contains(d)) w[d.str()] = w_value(u, d, chain[1]);
  }
  EXPECT_NEAR(std::abs(w.at("YZZY")), 0.5, 1e-12);
  for (const auto& [word, value] : w) {
    if (word != "YZZY") EXPECT_NEAR(value, 0.0, 1e-12) << word;
  }
  EXPECT_NEAR(optimal_angle(u, PauliString::parse("YZZY"), chain[1]), -kPi / 4.0, 1e-12);
}

TEST(OptimalAngle, BeatsAnAngleGrid) {
  std::mt19937_64 rng(32);
  const auto child = closure(3, {"ZII", "IXI"});
  const std::vector<std::string> candidates{"XII", "IIY", "YZX", "IYI"};
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = oracle::random_unitary(8, rng);
    for (const auto& w : candidates) {
      const auto d = PauliString::parse(w);
      const double theta = optimal_angle(u, d, child);
      const double best = dense_norm(u * oracle::expm(oracle::cd(0, theta) * oracle::pauli(w)), child);
      double grid = 0.0;
      for (int k = 0; k < 720; ++k) {
        const double t = -kPi / 2.0 + k * kPi / 720.0;
        grid = std::max(grid, dense_norm(u * oracle::expm(oracle::cd(0, t) * oracle::pauli(w)), child));
      }
      EXPECT_GE(best, grid - 1e-9) << w;
    }
  }
}

TEST(OptimalAngle, StallsWhenWAndDeltaVanish) {
  // Hadamard with child {I, Z}: both cosets carry weight 1/2 and W = 0.
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  EXPECT_THROW(optimal_angle(h, PauliString::parse("X"), closure(1, {"Z"})), StallError);
}

TEST(OptimalAngle, RejectsWordInsideChild) {
  const auto u = engineered_mirror_unitary(2);
  EXPECT_THROW(optimal_angle(u, PauliString::parse("ZZ"), closure(2, {"ZZ"})), PreconditionError);
}

TEST(Decompose, FourSiteChainGivesFourQuarterTurns) {
  const auto u = engineered_mirror_unitary(4);
  const auto r = decompose(u, four_site_chain());
  std::set<std::string> words;
  for (const auto& f : r.decomposition.factors) {
    words.insert(f.word.str());
    EXPECT_NEAR(std::abs(f.angle), kPi / 4.0, 1e-9);
  }
  EXPECT_EQ(words, (std::set<std::string>{"YZZY", "XZZX", "IXXI", "IYYI"}));
  EXPECT_LT(max_abs(reconstruct(r.decomposition) - u), 1e-9);
  EXPECT_TRUE(r.trace.monotone());
}

TEST(Decompose, AutomaticChainReconstructsChains) {
  for (int n = 2; n <= 6; ++n) {
    const auto u = engineered_mirror_unitary(n);
    const auto r = decompose(u);
    EXPECT_GE(unitary_fidelity(reconstruct(r.decomposition), u), 1.0 - 1e-9) << n;
    EXPECT_LT(max_abs(reconstruct(r.decomposition) - u), 1e-8) << n;
    EXPECT_TRUE(r.trace.monotone()) << n;
  }
}

TEST(Decompose, RandomProductsRoundTrip) {
  Sampler rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int count = 1 + static_cast<int>(rng.below(5));
    const auto product = rng.pauli_product(n, count);
    const auto u = reconstruct(product);
    const auto r = decompose(u);
    EXPECT_GE(unitary_fidelity(reconstruct(r.decomposition), u), 1.0 - 1e-9) << trial;
    EXPECT_TRUE(r.trace.monotone()) << trial;
    for (const auto& s : r.trace.steps) EXPECT_GE(s.norm_after, s.norm_before - 1e-12);
  }
}

TEST(Decompose, ProgressTraceMatchesResult) {
  PeelTrace progress;
  const auto r = decompose(engineered_mirror_unitary(4), four_site_chain(), {}, &progress);
  EXPECT_EQ(progress.steps.size(), r.trace.steps.size());
  EXPECT_EQ(progress.steps.size(), 4u);
}

TEST(Decompose, InputErrors) {
  EXPECT_THROW(decompose(Matrix::Ones(4, 4)), ValidationError);
  EXPECT_THROW(decompose(engineered_mirror_unitary(4), SubgroupChain({closure(3, {"XXX"}), PauliGroup(3)})),
               DimensionError);
  EXPECT_THROW(decompose(engineered_mirror_unitary(4), SubgroupChain({closure(4, {"ZZZZ"}), PauliGroup(4)})),
               PreconditionError);
}

TEST(PeelLevel, RequiresStrictSubgroup) {
  const auto g = closure(2, {"XX"});
  EXPECT_THROW(peel_level(Matrix::Identity(4, 4), g, g), PreconditionError);
}

TEST(ClosedForm, MatchesMirrorPropagatorExactly) {
  for (int n = 2; n <= 10; ++n) {
    const auto d = closed_form(n);
    const auto u = engineered_mirror_unitary(n);
    const auto v = reconstruct(d);
    EXPECT_GE(unitary_fidelity(u, v), 1.0 - 1e-9) << n;
    EXPECT_LT(max_abs(u - v), 1e-9) << n;
    EXPECT_EQ(d.factors.size(), static_cast<std::size_t>(n));
  }
}

TEST(ClosedForm, FiveSiteWords) {
  const auto d = closed_form(5);
  std::map<std::string, double> got;
  for (const auto& f : d.factors) got[f.word.str()] = f.angle;
  ASSERT_EQ(got.size(), 5u);
  for (const char* w : {"XZZZY", "YZZZX", "IXZYI", "IYZXI"}) EXPECT_NEAR(std::abs(got.at(w)), kPi / 4.0, 1e-15);
  EXPECT_NEAR(std::abs(got.at("XYIYX")), kPi / 2.0, 1e-15);
}

TEST(ClosedForm, RejectsShortChains) {
  EXPECT_THROW(closed_form(1), DomainError);
  EXPECT_THROW(closed_form(0), DomainError);
}

TEST(Reconstruct, MatchesDenseProduct) {
  Sampler rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = rng.pauli_product(3, 4);
    EXPECT_LT(max_abs(reconstruct(d) - dense_product(d)), 1e-12);
  }
  ProductDecomposition bad;
  bad.n_sites = 2;
  bad.factors.push_back({PauliString::parse("XXX"), 0.1});
  EXPECT_THROW(reconstruct(bad), DimensionError);
}

TEST(Decompose, AutomaticChainRecoversFromLexicographicStalls) {
  // Some products stall under the fixed maximal_subgroup chain. The
  // automatic search must still decompose every one of them.
  Sampler rng(11);
  int stalled = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const auto u = reconstruct(rng.pauli_product(4, 5));
    try {
      decompose(u, build_subgroup_chain(support_group(u)));
      continue;
    } catch (const DecompositionError&) {
      ++stalled;
    }
    const auto r = decompose(u);
    EXPECT_GE(unitary_fidelity(reconstruct(r.decomposition), u), 1.0 - 1e-9) << trial;
    EXPECT_TRUE(r.trace.monotone()) << trial;
    EXPECT_TRUE(r.chain[r.chain.size() - 1].is_trivial());
  }
  EXPECT_GT(stalled, 0);
}
