// mirrorchain command-line tool.
//
// Exit codes: 0 success, 1 a computed result missed its expectation (or the
// decomposition failed), 2 usage, parse or input errors.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mirrorchain/chain.hpp"
#include "mirrorchain/decomposition.hpp"
#include "mirrorchain/errors.hpp"
#include "mirrorchain/grape.hpp"
#include "mirrorchain/io.hpp"
#include "mirrorchain/mirror.hpp"
#include "mirrorchain/pauli.hpp"
#include "mirrorchain/pauli_group.hpp"
#include "mirrorchain/sampling.hpp"

namespace mc = mirrorchain;
using mc::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnmet = 1;
constexpr int kExitUsage = 2;

// Thrown for flag combinations CLI11 cannot express on its own.
struct UsageError : mc::Error {
  using mc::Error::Error;
};

struct ChainSource {
  std::string spec_file;
  int engineered = 0;
  int uniform = 0;

  void add_to(CLI::App* cmd) {
    auto* a = cmd->add_option("--spec", spec_file, "Chain spec JSON file")->check(CLI::ExistingFile);
    auto* b = cmd->add_option("--engineered", engineered, "Engineered chain with N sites");
    auto* c = cmd->add_option("--uniform", uniform, "Uniform chain (J = 1) with N sites");
    a->excludes(b)->excludes(c);
    b->excludes(c);
  }

  bool given() const { return !spec_file.empty() || engineered != 0 || uniform != 0; }

  mc::ChainSpec load() const {
    if (!spec_file.empty()) return mc::io::chain_spec_from_json(mc::io::read_json_file(spec_file));
    if (engineered != 0) return mc::ChainSpec::engineered(engineered);
    if (uniform != 0) {
      auto spec = mc::ChainSpec::uniform(uniform);
      spec.validate();
      return spec;
    }
    throw UsageError("one of --spec, --engineered or --uniform is required");
  }
};

struct Output {
  std::string path;
  bool verbose = false;

  // With -o the document goes to the file and the summary to stdout;
  // without it the document itself is the only thing on stdout.
  void emit(const std::string& document, const std::string& summary) const {
    if (path.empty() || path == "-") {
      std::cout << document;
      if (document.empty() || document.back() != '\n') std::cout << '\n';
    } else {
      mc::io::write_text_file(path, document);
      std::cout << summary;
    }
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v, int precision = 12) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  ChainSource source;
  double tau = mc::kPi / 2.0;
  bool expect_mirror = false;
  std::string format = "json";
  Output out;
};

int run_spectrum(const SpectrumArgs& a) {
  const auto spec = a.source.load();
  const auto report = mc::check_mirror_condition(spec, a.tau);

  std::string document;
  if (a.format == "csv") {
    std::ostringstream ss;
    ss.precision(17);
    ss << "nu,eigenvalue,parity,witness\n";
    for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      ss << i << ',' << report.eigenvalues(i) << ',' << report.parities[k] << ',';
      if (k < report.witnesses.size()) ss << report.witnesses[k];
      ss << '\n';
    }
    document = ss.str();
  } else {
    Json j;
    j["chain"] = mc::io::chain_spec_to_json(spec);
    j["report"] = mc::io::spectral_report_to_json(report);
    document = dump(j);
  }

  std::ostringstream summary;
  summary << "N = " << spec.n_sites << ", tau = " << fmt(a.tau) << "\n";
  summary << "eigenvalues:";
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i) summary << ' ' << fmt(report.eigenvalues(i), 10);
  summary << "\nparities alternate: " << (report.parities_alternate ? "yes" : "no")
          << ", max phase error " << fmt(report.max_phase_error, 3) << "\n";
  summary << "mirror condition: " << (report.satisfied ? "satisfied" : "not satisfied") << "\n";
  a.out.emit(document, summary.str());

  if (a.expect_mirror && !report.satisfied) {
    std::cerr << "expected perfect mirror inversion, but the condition fails\n";
    return kExitUnmet;
  }
  return kExitOk;
}

// --------------------------------------------------------------- decompose

struct DecomposeArgs {
  ChainSource source;
  std::string unitary_file;
  double tau = mc::kPi / 2.0;
  bool closed_form = false;
  bool auto_chain = false;
  std::vector<std::string> keep;
  std::string chain_file;
  std::string trace_file;
  double min_fidelity = 1.0 - 1e-9;
  Output out;
};

Json trace_document(const mc::PeelTrace& trace, const std::optional<mc::SubgroupChain>& chain,
                    const std::string& error) {
  Json j;
  if (chain) j["chain"] = mc::io::subgroup_chain_to_json(*chain);
  j["trace"] = mc::io::peel_trace_to_json(trace);
  j["monotone"] = trace.monotone();
  if (!error.empty()) j["error"] = error;
  return j;
}

int run_decompose(const DecomposeArgs& a) {
  if (a.unitary_file.empty() == !a.source.given()) {
    throw UsageError("give exactly one of --unitary or a chain (--spec, --engineered, --uniform)");
  }
  mc::Matrix u;
  int n = 0;
  if (!a.unitary_file.empty()) {
    u = mc::io::unitary_from_json(mc::io::read_json_file(a.unitary_file));
    n = mc::sites_for_dimension(u.rows());
  } else {
    const auto spec = a.source.load();
    n = spec.n_sites;
    if (a.closed_form && a.source.engineered == 0 && a.source.spec_file.empty()) {
      throw UsageError("--closed-form describes the engineered chain only");
    }
    mc::require_dense_size(n);
    u = mc::chain_propagator(spec, a.tau);
  }

  mc::ProductDecomposition d;
  std::optional<mc::SubgroupChain> chain;
  mc::PeelTrace trace;
  if (a.closed_form) {
    if (!a.keep.empty() || !a.chain_file.empty()) throw UsageError("--keep and --chain need --auto-chain");
    d = mc::closed_form(n);
  } else {
    if (!a.chain_file.empty()) {
      chain = mc::io::subgroup_chain_from_json(mc::io::read_json_file(a.chain_file));
    } else if (!a.keep.empty()) {
      std::vector<mc::PauliString> keep;
      for (const auto& w : a.keep) keep.push_back(mc::PauliString::parse(w));
      chain = mc::build_subgroup_chain(mc::support_group(u), keep);
    }
    try {
      auto result = mc::decompose(u, chain, {}, &trace);
      d = std::move(result.decomposition);
      chain = std::move(result.chain);
    } catch (const mc::DecompositionError& e) {
      const Json doc = trace_document(trace, chain, e.what());
      if (!a.trace_file.empty()) {
        mc::io::write_json_file(a.trace_file, doc);
      } else {
        std::cerr << doc.dump(2) << "\n";
      }
      std::cerr << "decomposition failed: " << e.what() << "\n";
      return kExitUnmet;
    }
  }
  if (!a.trace_file.empty()) mc::io::write_json_file(a.trace_file, trace_document(trace, chain, ""));

  const double fidelity = mc::unitary_fidelity(mc::reconstruct(d), u);
  std::ostringstream summary;
  summary << "factors (" << d.factors.size() << "):\n";
  for (const auto& f : d.factors) summary << "  " << f.word.str() << "  " << fmt(f.angle / mc::kPi) << " pi\n";
  summary << "global phase: " << fmt(d.global_phase.real()) << " + " << fmt(d.global_phase.imag()) << " i\n";
  summary << "reconstruction fidelity: " << fmt(fidelity, 15) << "\n";
  a.out.emit(dump(mc::io::decomposition_to_json(d)), summary.str());

  if (fidelity < a.min_fidelity) {
    std::cerr << "reconstruction fidelity " << fmt(fidelity, 15) << " below " << fmt(a.min_fidelity, 15) << "\n";
    return kExitUnmet;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- transfer

struct TransferArgs {
  ChainSource source;
  int site = 0;
  std::string state;
  std::string bell;
  std::string kind = "phi+";
  std::string mode = "pure";
  double tau = mc::kPi / 2.0;
  double min_fidelity = 1.0 - 1e-9;
  Output out;
};

std::pair<int, int> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--bell expects two sites as i,j");
  try {
    std::size_t used = 0;
    const int i = std::stoi(text.substr(0, comma), &used);
    if (used != comma) throw UsageError("bad site list " + text);
    const std::string rest = text.substr(comma + 1);
    const int j = std::stoi(rest, &used);
    if (used != rest.size()) throw UsageError("bad site list " + text);
    return {i, j};
  } catch (const std::logic_error&) {
    throw UsageError("bad site list " + text);
  }
}

// 2x2 input for a single-site transfer. Deviation mode takes a Pauli axis
// (x, y, z); pure mode takes a named state.
mc::Matrix single_input(const std::string& name, mc::TransferMode mode) {
  if (mode == mc::TransferMode::kDeviation) {
    const std::string axis = name.empty() ? "x" : name;
    if (axis != "x" && axis != "y" && axis != "z") {
      throw UsageError("deviation mode takes --state x, y or z");
    }
    return mc::pauli_matrix(mc::PauliString::single(1, 1, static_cast<char>(std::toupper(axis[0]))));
  }
  return mc::single_site_state(name.empty() ? "1" : name);
}

int run_transfer(const TransferArgs& a) {
  const auto spec = a.source.load();
  const auto mode = mc::parse_mode(a.mode);
  if ((a.site != 0) == !a.bell.empty()) throw UsageError("give exactly one of --site or --bell");

  mc::TransferReport report;
  if (a.site != 0) {
    report = mc::transfer_single(spec, a.site, single_input(a.state, mode), mode, a.tau);
  } else {
    report = mc::transfer_entangled(spec, parse_pair(a.bell), mc::parse_bell(a.kind), mode, a.tau);
  }

  std::ostringstream summary;
  summary << "mode " << mc::mode_name(report.mode) << ", sites";
  for (int s : report.source_sites) summary << ' ' << s;
  summary << " ->";
  for (int s : report.destination_sites) summary << ' ' << s;
  summary << "\nfidelity " << fmt(report.fidelity, 15) << ", attenuated correlation "
          << fmt(report.correlation, 15) << "\n";
  if (report.bell_input) {
    summary << "Bell " << *report.bell_input << " -> " << report.bell_output.value_or("(none)")
            << " (overlap " << fmt(report.bell_overlap, 15) << ")\n";
  }
  if (report.spectators_maximally_mixed) {
    summary << "other sites maximally mixed: " << (*report.spectators_maximally_mixed ? "yes" : "no") << "\n";
  }
  a.out.emit(dump(mc::io::transfer_report_to_json(report)), summary.str());

  if (report.fidelity < a.min_fidelity) {
    std::cerr << "fidelity " << fmt(report.fidelity, 15) << " below " << fmt(a.min_fidelity, 15) << "\n";
    return kExitUnmet;
  }
  return kExitOk;
}

// ------------------------------------------------------------------- grape

struct GrapeArgs {
  std::string system_file;
  int spins = 0;
  std::string gate;
  std::string pauli_exp;
  std::string decomposition_file;
  int factor = 0;
  std::string unitary_file;
  mc::GrapeConfig config;
  double min_fidelity = 0.99;
  std::string pulse_csv;
  Output out;
};

mc::Matrix grape_target(const GrapeArgs& a, int n) {
  const int chosen = static_cast<int>(!a.gate.empty()) + static_cast<int>(!a.pauli_exp.empty()) +
                     static_cast<int>(!a.decomposition_file.empty()) + static_cast<int>(!a.unitary_file.empty());
  if (chosen != 1) {
    throw UsageError("give exactly one of --gate, --pauli-exp, --target-decomposition, --target-unitary");
  }
  const auto dim = Eigen::Index{1} << n;
  mc::Matrix target;
  if (!a.gate.empty()) {
    target = a.gate == "identity" ? mc::Matrix::Identity(dim, dim).eval()
                                  : mc::pauli_matrix(mc::PauliString::parse(a.gate));
  } else if (!a.pauli_exp.empty()) {
    const auto colon = a.pauli_exp.find(':');
    if (colon == std::string::npos) throw UsageError("--pauli-exp expects WORD:ANGLE");
    double angle = 0.0;
    try {
      std::size_t used = 0;
      const std::string text = a.pauli_exp.substr(colon + 1);
      angle = std::stod(text, &used);
      if (used != text.size()) throw UsageError("bad angle in --pauli-exp");
    } catch (const std::logic_error&) {
      throw UsageError("bad angle in --pauli-exp");
    }
    target = mc::pauli_exponential(mc::PauliString::parse(a.pauli_exp.substr(0, colon)), angle);
  } else if (!a.decomposition_file.empty()) {
    auto d = mc::io::decomposition_from_json(mc::io::read_json_file(a.decomposition_file));
    if (a.factor != 0) {
      if (a.factor < 1 || a.factor > static_cast<int>(d.factors.size())) {
        throw mc::DomainError("--factor out of range");
      }
      const auto f = d.factors[static_cast<std::size_t>(a.factor - 1)];
      d.factors = {f};
      d.global_phase = 1.0;
    }
    target = mc::reconstruct(d);
  } else {
    target = mc::io::unitary_from_json(mc::io::read_json_file(a.unitary_file));
  }
  if (target.rows() != dim) throw mc::DimensionError("target size does not match the spin system");
  return target;
}

int run_grape(const GrapeArgs& a) {
  if (a.system_file.empty() == (a.spins == 0)) throw UsageError("give exactly one of --system or --spins");
  const auto spec = a.system_file.empty() ? mc::NmrSystemSpec::independent(a.spins)
                                          : mc::io::nmr_spec_from_json(mc::io::read_json_file(a.system_file));
  spec.validate();
  const auto target = grape_target(a, spec.n_spins);
  const auto result = mc::grape_optimize(spec, target, a.config);

  if (!a.pulse_csv.empty()) mc::io::write_text_file(a.pulse_csv, mc::io::pulse_to_csv(result.pulse));
  std::ostringstream summary;
  summary << "fidelity " << fmt(result.fidelity, 10) << " after " << result.iterations << " iterations"
          << (result.converged ? " (target reached)" : "") << "\n";
  summary << "pulse: " << result.pulse.steps() << " steps x " << fmt(result.pulse.dt * 1e3, 6)
          << " ms, peak " << fmt(result.pulse.peak_amplitude(), 6) << " Hz\n";
  a.out.emit(dump(mc::io::grape_result_to_json(result)), summary.str());

  if (result.fidelity < a.min_fidelity) {
    std::cerr << "fidelity " << fmt(result.fidelity, 10) << " below " << fmt(a.min_fidelity, 10) << "\n";
    return kExitUnmet;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- selftest

struct SelftestArgs {
  std::uint64_t seed = 2024;
  int count = 100;
  int max_sites = 4;
  int max_factors = 6;
  Output out;
};

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int run_selftest(const SelftestArgs& a) {
  if (a.count < 1 || a.max_sites < 1 || a.max_factors < 1) throw UsageError("counts must be positive");
  mc::require_dense_size(a.max_sites);
  mc::Sampler sampler(a.seed);

  int failures = 0;
  double worst_fidelity = 1.0;
  double worst_parseval = 0.0;
  Json cases = Json::array();
  for (int i = 0; i < a.count; ++i) {
    const int n = 1 + static_cast<int>(sampler.below(static_cast<std::uint64_t>(a.max_sites)));
    const int count = 1 + static_cast<int>(sampler.below(static_cast<std::uint64_t>(a.max_factors)));
    const auto product = sampler.pauli_product(n, count);
    const auto u = mc::reconstruct(product);

    double parseval = 0.0;
    for (const auto& [word, c] : mc::pauli_coefficients(u, 0.0)) parseval += std::norm(c);
    const auto group = mc::support_group(u);

    Json c;
    c["case"] = i + 1;
    c["n"] = n;
    c["factors"] = count;
    c["parseval_error"] = std::abs(parseval - 1.0);
    c["group_size"] = group.size();
    bool ok = std::abs(parseval - 1.0) <= 1e-10 && is_power_of_two(group.size());
    try {
      const auto result = mc::decompose(u);
      const double f = mc::unitary_fidelity(mc::reconstruct(result.decomposition), u);
      c["fidelity"] = f;
      c["monotone"] = result.trace.monotone();
      ok = ok && f >= 1.0 - 1e-9 && result.trace.monotone();
      worst_fidelity = std::min(worst_fidelity, f);
    } catch (const mc::Error& e) {
      c["error"] = e.what();
      ok = false;
      worst_fidelity = 0.0;
    }
    worst_parseval = std::max(worst_parseval, std::abs(parseval - 1.0));
    c["ok"] = ok;
    if (!ok) ++failures;
    if (a.out.verbose || !ok) {
      std::cerr << "case " << i + 1 << " n=" << n << " factors=" << count << (ok ? " ok" : " FAILED") << "\n";
    }
    cases.push_back(std::move(c));
  }

  Json j;
  j["seed"] = a.seed;
  j["count"] = a.count;
  j["failures"] = failures;
  j["worst_fidelity"] = worst_fidelity;
  j["worst_parseval_error"] = worst_parseval;
  j["cases"] = std::move(cases);
  std::ostringstream summary;
  summary << a.count - failures << "/" << a.count << " cases passed (seed " << a.seed
          << "), worst round-trip fidelity " << fmt(worst_fidelity, 15) << "\n";
  a.out.emit(dump(j), summary.str());
  return failures == 0 ? kExitOk : kExitUnmet;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror-inversion spin chains: spectra, transfer, Pauli decomposition and GRAPE pulses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mirrorchain 1.0.0");

  auto add_output = [](CLI::App* cmd, Output& out) {
    cmd->add_option("-o,--output", out.path, "Write the machine-readable result here (default stdout)");
    cmd->add_flag("-v,--verbose", out.verbose, "Extra progress on stderr");
  };

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "Single-excitation spectrum and the mirror condition");
  spectrum.source.add_to(sp);
  sp->add_option("--tau", spectrum.tau, "Evolution time (default pi/2)");
  sp->add_flag("--expect-mirror", spectrum.expect_mirror, "Exit 1 unless the mirror condition holds");
  sp->add_option("--format", spectrum.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_output(sp, spectrum.out);

  DecomposeArgs decompose;
  auto* dc = app.add_subcommand("decompose", "Product of Pauli exponentials for a chain propagator or unitary");
  decompose.source.add_to(dc);
  dc->add_option("--unitary", decompose.unitary_file, "Unitary JSON file")->check(CLI::ExistingFile);
  dc->add_option("--tau", decompose.tau, "Evolution time for chain input (default pi/2)");
  auto* cf = dc->add_flag("--closed-form", decompose.closed_form, "Use the explicit engineered-chain product");
  auto* ac = dc->add_flag("--auto-chain", decompose.auto_chain, "Greedy peeling (default)");
  cf->excludes(ac);
  dc->add_option("--keep", decompose.keep, "Words every automatic subgroup should retain");
  dc->add_option("--chain", decompose.chain_file, "Explicit subgroup chain JSON")->check(CLI::ExistingFile);
  dc->add_option("--trace", decompose.trace_file, "Write the peel trace here");
  dc->add_option("--min-fidelity", decompose.min_fidelity, "Required reconstruction fidelity");
  add_output(dc, decompose.out);

  TransferArgs transfer;
  auto* tr = app.add_subcommand("transfer", "Mirror transfer of a site state or a Bell pair");
  transfer.source.add_to(tr);
  tr->add_option("--site", transfer.site, "Source site (1-based)");
  tr->add_option("--state", transfer.state,
                 "Pure: 0, 1, +x, -x, +y, -y, +z, -z (default 1). Deviation: x, y, z (default x)");
  tr->add_option("--bell", transfer.bell, "Source pair i,j");
  tr->add_option("--kind", transfer.kind, "Bell state: phi+, phi-, psi+, psi-");
  tr->add_option("--mode", transfer.mode, "pure or deviation")->check(CLI::IsMember({"pure", "deviation"}));
  tr->add_option("--tau", transfer.tau, "Evolution time (default pi/2)");
  tr->add_option("--min-fidelity", transfer.min_fidelity, "Exit 1 below this fidelity");
  add_output(tr, transfer.out);

  GrapeArgs grape;
  auto* gr = app.add_subcommand("grape", "Optimise a control pulse for a target gate");
  gr->add_option("--system", grape.system_file, "NMR system JSON file")->check(CLI::ExistingFile);
  gr->add_option("--spins", grape.spins, "Independent spins with no drift");
  gr->add_option("--gate", grape.gate, "Pauli word gate, or 'identity'");
  gr->add_option("--pauli-exp", grape.pauli_exp, "WORD:ANGLE for exp(-i ANGLE WORD)");
  gr->add_option("--target-decomposition", grape.decomposition_file, "Decomposition JSON file")
      ->check(CLI::ExistingFile);
  gr->add_option("--factor", grape.factor, "Use only factor K (1-based) of the decomposition");
  gr->add_option("--target-unitary", grape.unitary_file, "Unitary JSON file")->check(CLI::ExistingFile);
  gr->add_option("--steps", grape.config.steps, "Number of time steps");
  gr->add_option("--dt", grape.config.dt, "Step length in seconds");
  gr->add_option("--cap", grape.config.amplitude_cap_hz, "Amplitude cap per channel, Hz");
  gr->add_option("--max-iter", grape.config.max_iterations, "Iteration cap");
  gr->add_option("--rf-scales", grape.config.rf_scales, "RF scale ensemble")->delimiter(',');
  gr->add_option("--seed", grape.config.seed, "Seed for the random restart");
  gr->add_option("--target-fidelity", grape.config.target_fidelity, "Stop once this objective is reached");
  gr->add_option("--min-fidelity", grape.min_fidelity, "Exit 1 below this fidelity");
  gr->add_option("--pulse-csv", grape.pulse_csv, "Write the pulse as CSV");
  add_output(gr, grape.out);

  SelftestArgs selftest;
  auto* st = app.add_subcommand("selftest", "Seeded randomized property checks");
  st->add_option("--seed", selftest.seed, "Random seed");
  st->add_option("--count", selftest.count, "Number of random products");
  st->add_option("--max-sites", selftest.max_sites, "Largest site count");
  st->add_option("--max-factors", selftest.max_factors, "Largest factor count");
  add_output(st, selftest.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sp->parsed()) return run_spectrum(spectrum);
    if (dc->parsed()) return run_decompose(decompose);
    if (tr->parsed()) return run_transfer(transfer);
    if (gr->parsed()) return run_grape(grape);
    if (st->parsed()) return run_selftest(selftest);
  } catch (const mc::DecompositionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnmet;
  } catch (const mc::StallError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnmet;
  } catch (const mc::MetricError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnmet;
  } catch (const mc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
