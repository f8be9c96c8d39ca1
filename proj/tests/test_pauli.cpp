#include <gtest/gtest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "mirrorchain/errors.hpp"
#include "mirrorchain/pauli.hpp"
#include "oracles.hpp"

using namespace mirrorchain;

namespace {

std::vector<std::string> all_words(int n) {
  std::vector<std::string> out{""};
  for (int s = 0; s < n; ++s) {
    std::vector<std::string> next;
    for (const auto& w : out) {
      for (char c : std::string("IXYZ")) next.push_back(w + c);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(PauliString, ParseAndPrintRoundTrip) {
  for (const auto& w : all_words(3)) EXPECT_EQ(PauliString::parse(w).str(), w);
  const auto p = PauliString::parse("XIZY");
  EXPECT_EQ(p.n_sites(), 4);
  EXPECT_EQ(p.letter(1), 'X');
  EXPECT_EQ(p.letter(4), 'Y');
  EXPECT_EQ(p.weight(), 3);
}

TEST(PauliString, RejectsBadText) {
  EXPECT_THROW(PauliString::parse("XQ"), ParseError);
  EXPECT_THROW(PauliString::parse("xz"), ParseError);
  EXPECT_THROW(PauliString::parse(""), DomainError);
  EXPECT_THROW(PauliString::single(3, 4, 'X'), DomainError);
}

TEST(PauliString, CanonicalOrderIsIXYZ) {
  std::vector<PauliString> words;
  for (const auto& w : all_words(2)) words.push_back(PauliString::parse(w));
  std::sort(words.begin(), words.end(), CanonicalLess{});
  std::vector<std::string> got;
  for (const auto& w : words) got.push_back(w.str());
  EXPECT_EQ(got, all_words(2));  // all_words enumerates I, X, Y, Z lexicographically
}

TEST(PauliMatrix, MatchesKroneckerProducts) {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& w : all_words(n)) {
      EXPECT_LT(max_abs(pauli_matrix(PauliString::parse(w)) - oracle::pauli(w)), 1e-15) << w;
    }
  }
}

TEST(PauliMatrix, SingleSiteMatrices) {
  EXPECT_EQ(pauli_matrix(PauliString::parse("Z")), oracle::single('Z'));
  EXPECT_EQ(pauli_matrix(PauliString::parse("Y")), oracle::single('Y'));
}

TEST(PauliMatrix, RespectsDenseCap) {
  EXPECT_THROW(pauli_matrix(PauliString(13)), ResourceError);
  EXPECT_THROW(pauli_matrix(PauliString(3), 2), ResourceError);
}

TEST(PauliProduct, PhaseMatchesMatrixProduct) {
  const auto words = all_words(2);
  for (const auto& a : words) {
    for (const auto& b : words) {
      const auto prod = pauli_mul(PauliString::parse(a), PauliString::parse(b));
      const oracle::Mat expect = oracle::pauli(a) * oracle::pauli(b);
      EXPECT_LT(max_abs(pauli_matrix(prod) - expect), 1e-15) << a << " * " << b;
      EXPECT_EQ(word_product(PauliString::parse(a), PauliString::parse(b)), prod.word);
    }
  }
}

TEST(PauliProduct, TextbookPhases) {
  const auto xy = pauli_mul(PauliString::parse("X"), PauliString::parse("Y"));
  EXPECT_EQ(xy.word.str(), "Z");
  EXPECT_EQ(xy.phase_str(), "+i");
  const auto yx = pauli_mul(PauliString::parse("Y"), PauliString::parse("X"));
  EXPECT_EQ(yx.phase_str(), "-i");
  const auto xx = pauli_mul(PauliString::parse("XX"), PauliString::parse("YY"));
  EXPECT_EQ(xx.word.str(), "ZZ");
  EXPECT_EQ(xx.phase_str(), "-1");
}

TEST(PauliProduct, MismatchedLengthsThrow) {
  EXPECT_THROW(pauli_mul(PauliString::parse("X"), PauliString::parse("XX")), DimensionError);
}

TEST(PauliString, CommutationMatchesCommutator) {
  const auto words = all_words(2);
  for (const auto& a : words) {
    for (const auto& b : words) {
      const oracle::Mat pa = oracle::pauli(a);
      const oracle::Mat pb = oracle::pauli(b);
      const bool commute = (pa * pb - pb * pa).cwiseAbs().maxCoeff() < 1e-12;
      EXPECT_EQ(PauliString::parse(a).commutes_with(PauliString::parse(b)), commute) << a << "," << b;
    }
  }
}

TEST(PhasedPauli, PhaseText) {
  for (const char* t : {"+1", "+i", "-1", "-i"}) {
    PhasedPauli p{PhasedPauli::parse_phase(t), PauliString::parse("X")};
    EXPECT_EQ(p.phase_str(), t);
  }
  EXPECT_THROW(PhasedPauli::parse_phase("2"), ParseError);
}

TEST(PauliTrace, MatchesDenseTrace) {
  std::mt19937_64 rng(11);
  const auto u = oracle::random_matrix(8, 8, rng);
  for (const auto& w : all_words(3)) {
    const complex expect = (u * oracle::pauli(w)).trace();
    EXPECT_LT(std::abs(pauli_trace(u, PauliString::parse(w)) - expect), 1e-12) << w;
  }
}

TEST(PauliMultiply, LeftAndRightMatchDense) {
  std::mt19937_64 rng(12);
  const auto u = oracle::random_matrix(8, 8, rng);
  for (const auto& w : all_words(3)) {
    const auto p = PauliString::parse(w);
    EXPECT_LT(max_abs(right_multiply(u, p) - u * oracle::pauli(w)), 1e-12);
    EXPECT_LT(max_abs(left_multiply(p, u) - oracle::pauli(w) * u), 1e-12);
  }
  EXPECT_THROW(right_multiply(u, PauliString::parse("XX")), DimensionError);
}

TEST(PauliExponential, MatchesSeriesAndClosedForm) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const auto u = oracle::random_unitary(8, rng);
  for (const auto& w : {"XYZ", "IIZ", "YIX", "ZZZ"}) {
    const double theta = angle(rng);
    const oracle::Mat expect = oracle::expm(oracle::cd(0, -theta) * oracle::pauli(w));
    const auto p = PauliString::parse(w);
    EXPECT_LT(max_abs(pauli_exponential(p, theta) - expect), 1e-12) << w;
    EXPECT_LT(max_abs(apply_pauli_exponential_right(u, p, theta) - u * expect), 1e-12) << w;
  }
}
