#include "mirrorchain/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <unordered_map>

#include "mirrorchain/errors.hpp"

namespace mirrorchain {

namespace {

std::uint64_t pack(const PauliString& p) { return (p.x_mask() << 32) | p.z_mask(); }

double dim_of(const Matrix& u) { return static_cast<double>(u.rows()); }

void check_operand(const Matrix& u, int n_sites) {
  if (u.rows() != u.cols() || u.rows() != (Eigen::Index{1} << n_sites)) {
    throw DimensionError("operator dimension does not match the group's site count");
  }
}

// Tr(U P) for every P in the group, keyed by packed masks.
std::unordered_map<std::uint64_t, complex> trace_table(const Matrix& u, const PauliGroup& g) {
  std::unordered_map<std::uint64_t, complex> table;
  table.reserve(g.size());
  for (const auto& p : g.elements()) table.emplace(pack(p), pauli_trace(u, p));
  return table;
}

// Child norm of U exp(i theta D) in terms of A, B and W.
double realised_norm(double a, double b, double w, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return a * c * c + b * s * s + w * std::sin(2.0 * theta);
}

double wrap_half_turn(double theta) {
  while (theta > kPi / 2.0) theta -= kPi;
  while (theta <= -kPi / 2.0) theta += kPi;
  return theta;
}

double best_branch(double a, double b, double w) {
  const double delta = 0.5 * (a - b);
  const double first = 0.5 * std::atan2(w, delta);
  const double second = wrap_half_turn(first + kPi / 2.0);
  const double n1 = realised_norm(a, b, w, first);
  const double n2 = realised_norm(a, b, w, second);
  if (std::abs(n1 - n2) <= 1e-15) return std::abs(first) <= std::abs(second) ? first : second;
  return n1 > n2 ? first : second;
}

struct CandidateScore {
  double a = 0.0;  // child norm
  double b = 0.0;  // norm of the D-coset
  double w = 0.0;
};

CandidateScore score(const std::unordered_map<std::uint64_t, complex>& traces,
                     const PauliString& d, const PauliGroup& child, double tau) {
  CandidateScore s;
  complex cross{0.0, 0.0};
  for (const auto& r : child.elements()) {
    const complex a = traces.at(pack(r));
    const PhasedPauli dr = pauli_mul(d, r);
    const complex b = dr.phase() * traces.at(pack(dr.word));
    s.a += std::norm(a);
    s.b += std::norm(b);
    cross += a * std::conj(b);
  }
  const double t2 = tau * tau;
  s.a /= t2;
  s.b /= t2;
  s.w = cross.imag() / t2;
  return s;
}

}  // namespace

bool PeelTrace::monotone(double tol) const {
  for (const auto& s : steps) {
    if (s.norm_after < s.norm_before - tol) return false;
  }
  return true;
}

ExpansionTable expand(const Matrix& u, const PauliGroup& group) {
  check_operand(u, group.n_sites());
  ExpansionTable out;
  out.reserve(group.size());
  for (const auto& p : group.elements()) out.emplace_back(p, pauli_trace(u, p) / dim_of(u));
  return out;
}

double norm(const Matrix& u, const PauliGroup& group) {
  check_operand(u, group.n_sites());
  double total = 0.0;
  for (const auto& p : group.elements()) total += std::norm(pauli_trace(u, p));
  return total / (dim_of(u) * dim_of(u));
}

double w_value(const Matrix& u, const PauliString& d, const PauliGroup& child) {
  check_operand(u, child.n_sites());
  complex cross{0.0, 0.0};
  for (const auto& r : child.elements()) {
    const PhasedPauli dr = pauli_mul(d, r);
    cross += pauli_trace(u, r) * std::conj(dr.phase() * pauli_trace(u, dr.word));
  }
  return cross.imag() / (dim_of(u) * dim_of(u));
}

double optimal_angle(const Matrix& u, const PauliString& d, const PauliGroup& child) {
  check_operand(u, child.n_sites());
  if (child.contains(d)) throw PreconditionError("peel word " + d.str() + " lies in the child group");
  std::unordered_map<std::uint64_t, complex> traces;
  for (const auto& r : child.elements()) {
    traces.emplace(pack(r), pauli_trace(u, r));
    const PauliString q = word_product(d, r);
    traces.emplace(pack(q), pauli_trace(u, q));
  }
  const CandidateScore s = score(traces, d, child, dim_of(u));
  if (std::abs(s.w) <= 1e-12 && std::abs(0.5 * (s.a - s.b)) <= 1e-12) {
    throw StallError("W and Delta both vanish for " + d.str());
  }
  return best_branch(s.a, s.b, s.w);
}

PeelLevelResult peel_level(const Matrix& u, const PauliGroup& parent, const PauliGroup& child,
                           const PeelOptions& options, PeelTrace* trace, std::size_t level) {
  check_operand(u, parent.n_sites());
  if (!child.is_subgroup_of(parent) || child.size() >= parent.size()) {
    throw PreconditionError("child is not a strict subgroup of the parent");
  }
  std::vector<PauliString> candidates;
  for (const auto& p : parent.elements()) {
    if (!child.contains(p)) candidates.push_back(p);
  }
  const double tau = dim_of(u);

  PeelLevelResult result{{}, u};
  for (int step = 0;; ++step) {
    const auto traces = trace_table(result.residual, parent);
    double a = 0.0;
    for (const auto& r : child.elements()) a += std::norm(traces.at(pack(r)));
    a /= tau * tau;
    if (1.0 - a <= options.peel_tolerance) break;
    if (step >= options.max_steps_per_level) {
      throw DecompositionError("peeling level " + std::to_string(level) + " did not converge after " +
                               std::to_string(step) + " steps (child norm " + std::to_string(a) + ")");
    }

    std::vector<CandidateScore> scores(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
      scores[i] = score(traces, candidates[i], child, tau);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (std::abs(scores[i].w) > std::abs(scores[best].w) + options.stall_tolerance) best = i;
    }

    PeelStep record;
    record.level = level;
    record.norm_before = a;
    if (std::abs(scores[best].w) > options.stall_tolerance) {
      record.angle = best_branch(scores[best].a, scores[best].b, scores[best].w);
    } else {
      // Every |W| vanishes: search an angle grid over all candidates.
      double best_gain = 0.0;
      bool found = false;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        for (int k = 0; k < options.grid_points; ++k) {
          const double theta = -kPi / 2.0 + (k + 1) * kPi / options.grid_points;
          const double gain = realised_norm(scores[i].a, scores[i].b, scores[i].w, theta) - a;
          if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best = i;
            record.angle = theta;
            found = true;
          }
        }
      }
      if (!found) {
        throw DecompositionError("peeling stalled at level " + std::to_string(level) +
                                 " with child norm " + std::to_string(a));
      }
      record.grid_fallback = true;
    }
    record.word = candidates[best];
    record.w = scores[best].w;
    record.delta = 0.5 * (scores[best].a - scores[best].b);
    result.residual = apply_pauli_exponential_right(result.residual, record.word, -record.angle);
    record.norm_after = norm(result.residual, child);
    result.peels.push_back({record.word, record.angle});
    if (trace != nullptr) trace->steps.push_back(record);
  }
  return result;
}

namespace {

struct ChainSearch {
  const PeelOptions& options;
  PeelTrace* progress;
  int attempts = 0;
  std::vector<PauliGroup> levels;
  std::vector<PauliFactor> peels;
  std::vector<PeelStep> steps;
  Matrix residual;
};

std::vector<PauliGroup> candidate_children(const Matrix& u, const PauliGroup& parent) {
  std::vector<PauliGroup> out{maximal_subgroup(parent)};
  std::vector<std::pair<double, PauliGroup>> rest;
  for (auto& g : index_two_subgroups(parent)) {
    if (g == out.front()) continue;
    const double w = norm(u, g);
    rest.emplace_back(w, std::move(g));
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& entry : rest) out.push_back(std::move(entry.second));
  return out;
}

bool search_chain(ChainSearch& s, const Matrix& u, const PauliGroup& parent, std::size_t level) {
  if (parent.is_trivial()) {
    s.residual = u;
    return true;
  }
  for (const auto& child : candidate_children(u, parent)) {
    if (++s.attempts > s.options.max_chain_attempts) {
      throw DecompositionError("no workable subgroup chain found within " +
                               std::to_string(s.options.max_chain_attempts) + " peel attempts");
    }
    PeelTrace local;
    PeelLevelResult step;
    bool ok = true;
    try {
      step = peel_level(u, parent, child, s.options, &local, level);
    } catch (const DecompositionError&) {
      ok = false;
    }
    if (s.progress != nullptr) {
      s.progress->steps.insert(s.progress->steps.end(), local.steps.begin(), local.steps.end());
    }
    if (!ok) continue;

    const auto marks = std::make_tuple(s.levels.size(), s.peels.size(), s.steps.size());
    s.levels.push_back(child);
    s.peels.insert(s.peels.end(), step.peels.begin(), step.peels.end());
    s.steps.insert(s.steps.end(), local.steps.begin(), local.steps.end());
    if (search_chain(s, step.residual, child, level + 1)) return true;
    s.levels.resize(std::get<0>(marks), PauliGroup(parent.n_sites()));
    s.peels.resize(std::get<1>(marks));
    s.steps.resize(std::get<2>(marks));
  }
  return false;
}

}  // namespace

DecompositionResult decompose(const Matrix& u, const std::optional<SubgroupChain>& chain,
                              const PeelOptions& options, PeelTrace* progress) {
  require_unitary(u);
  const int n = sites_for_dimension(u.rows());
  require_dense_size(n);

  DecompositionResult out;
  Matrix residual = u;
  std::vector<PauliFactor> peels;
  if (chain) {
    if (chain->empty() || (*chain)[0].n_sites() != n) {
      throw DimensionError("subgroup chain does not match the operator's site count");
    }
    if (1.0 - norm(u, (*chain)[0]) > options.peel_tolerance) {
      throw PreconditionError("top group of the chain does not cover the operator's support");
    }
    out.chain = *chain;
    PeelTrace& trace = progress != nullptr ? *progress : out.trace;
    for (std::size_t level = 0; level + 1 < out.chain.size(); ++level) {
      auto step = peel_level(residual, out.chain[level], out.chain[level + 1], options, &trace, level);
      residual = std::move(step.residual);
      peels.insert(peels.end(), step.peels.begin(), step.peels.end());
    }
    if (progress != nullptr) out.trace = *progress;
  } else {
    ChainSearch s{options, progress, 0, {}, {}, {}, Matrix()};
    const PauliGroup top = support_group(u);
    s.levels.push_back(top);
    if (!search_chain(s, u, top, 0)) {
      throw DecompositionError("peeling stalled for every subgroup chain below the support group");
    }
    residual = std::move(s.residual);
    peels = std::move(s.peels);
    out.trace.steps = std::move(s.steps);
    out.chain = SubgroupChain(std::move(s.levels));
  }

  // U prod exp(i t_k D_k) = c 1, so U = c exp(-i t_m D_m) ... exp(-i t_1 D_1).
  const complex c = residual.trace() / dim_of(u);
  if (std::abs(std::abs(c) - 1.0) > 1e-6) {
    throw DecompositionError("final residual is not a multiple of the identity");
  }
  out.decomposition.n_sites = n;
  out.decomposition.global_phase = c / std::abs(c);
  out.decomposition.factors.assign(peels.rbegin(), peels.rend());
  return out;
}

ProductDecomposition closed_form(int n_sites) {
  if (n_sites < 2) throw DomainError("closed form needs N >= 2");
  const int n = n_sites;
  const bool odd = n % 2 == 1;
  const int r = n % 4;
  const double s = (r == 0 || r == 1) ? 1.0 : -1.0;

  ProductDecomposition d;
  d.n_sites = n;
  const char ends[2][2] = {{'X', odd ? 'Y' : 'X'}, {'Y', odd ? 'X' : 'Y'}};
  for (int a = 0, b = n - 1; a < b; ++a, --b) {
    if (odd && b - a < 2) break;
    for (const auto& pair : ends) {
      std::string word(static_cast<std::size_t>(n), 'I');
      word[static_cast<std::size_t>(a)] = pair[0];
      word[static_cast<std::size_t>(b)] = pair[1];
      for (int j = a + 1; j < b; ++j) word[static_cast<std::size_t>(j)] = 'Z';
      d.factors.push_back({PauliString::parse(word), -s * kPi / 4.0});
    }
  }
  if (odd) {
    std::string word(static_cast<std::size_t>(n), 'I');
    const int mid = n / 2;
    for (int j = 0; j < mid; ++j) {
      const char letter = j % 2 == 0 ? 'X' : 'Y';
      word[static_cast<std::size_t>(j)] = letter;
      word[static_cast<std::size_t>(n - 1 - j)] = letter;
    }
    d.factors.push_back({PauliString::parse(word), -s * kPi / 2.0});
    // The odd-N product matches the propagator up to a quarter-turn phase.
    d.global_phase = (n % 8 == 1 || n % 8 == 3) ? complex{0.0, -1.0} : complex{0.0, 1.0};
  }
  return d;
}

Matrix reconstruct(const ProductDecomposition& d) {
  require_dense_size(d.n_sites);
  const Eigen::Index dim = Eigen::Index{1} << d.n_sites;
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& f : d.factors) {
    if (f.word.n_sites() != d.n_sites) throw DimensionError("factor word has the wrong site count");
    u = apply_pauli_exponential_right(u, f.word, f.angle);
  }
  return d.global_phase * u;
}

}  // namespace mirrorchain
