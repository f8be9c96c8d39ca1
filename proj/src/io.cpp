#include "mirrorchain/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mirrorchain/errors.hpp"

namespace mirrorchain::io {

namespace {

template <typename T>
T get_as(const Json& obj, const char* key, std::string_view what) {
  if (!obj.contains(key)) throw ParseError(std::string(what) + ": missing key \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": bad value for \"" + key + "\": " + e.what());
  }
}

Json real_matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json sites_json(const std::vector<int>& s) { return Json(s); }

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_known_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view what) {
  if (!obj.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto a : allowed) known = known || item.key() == a;
    if (!known) throw ParseError(std::string(what) + ": unknown key \"" + item.key() + "\"");
  }
}

Json complex_to_json(complex z) { return Json::array({z.real(), z.imag()}); }

complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex value must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ParseError("matrix rows must be lists");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json phased_pauli_to_json(const PhasedPauli& p) {
  Json j;
  j["phase"] = p.phase_str();
  j["word"] = p.word.str();
  return j;
}

PhasedPauli phased_pauli_from_json(const Json& j) {
  require_known_keys(j, {"phase", "word"}, "Pauli");
  const auto phase = get_as<std::string>(j, "phase", "Pauli");
  const auto word = get_as<std::string>(j, "word", "Pauli");
  return PhasedPauli{PhasedPauli::parse_phase(phase), PauliString::parse(word)};
}

Json chain_spec_to_json(const ChainSpec& spec) {
  Json j;
  j["n"] = spec.n_sites;
  j["couplings"] = spec.couplings;
  j["fields"] = spec.fields;
  j["engineered"] = false;
  return j;
}

ChainSpec chain_spec_from_json(const Json& j) {
  require_known_keys(j, {"n", "couplings", "fields", "engineered"}, "chain spec");
  const int n = get_as<int>(j, "n", "chain spec");
  const bool engineered = j.contains("engineered") ? get_as<bool>(j, "engineered", "chain spec") : false;
  ChainSpec spec;
  if (engineered) {
    spec = ChainSpec::engineered(n);
    if (j.contains("couplings")) spec.couplings = get_as<std::vector<double>>(j, "couplings", "chain spec");
    if (j.contains("fields")) spec.fields = get_as<std::vector<double>>(j, "fields", "chain spec");
  } else {
    spec.n_sites = n;
    spec.couplings = get_as<std::vector<double>>(j, "couplings", "chain spec");
    spec.fields = j.contains("fields") ? get_as<std::vector<double>>(j, "fields", "chain spec")
                                       : std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), 0.0);
  }
  spec.validate();
  return spec;
}

Json decomposition_to_json(const ProductDecomposition& d) {
  Json j;
  j["n"] = d.n_sites;
  j["global_phase"] = complex_to_json(d.global_phase);
  Json factors = Json::array();
  for (const auto& f : d.factors) {
    Json fj;
    fj["word"] = f.word.str();
    fj["angle"] = f.angle;
    factors.push_back(std::move(fj));
  }
  j["factors"] = std::move(factors);
  return j;
}

ProductDecomposition decomposition_from_json(const Json& j) {
  require_known_keys(j, {"n", "global_phase", "factors"}, "decomposition");
  ProductDecomposition d;
  d.n_sites = get_as<int>(j, "n", "decomposition");
  if (d.n_sites < 1) throw ParseError("decomposition: n must be positive");
  d.global_phase = j.contains("global_phase") ? complex_from_json(j.at("global_phase")) : complex{1.0, 0.0};
  if (!j.contains("factors") || !j.at("factors").is_array()) throw ParseError("decomposition: factors must be a list");
  for (const auto& fj : j.at("factors")) {
    require_known_keys(fj, {"word", "angle"}, "decomposition factor");
    PauliFactor f{PauliString::parse(get_as<std::string>(fj, "word", "decomposition factor")),
                  get_as<double>(fj, "angle", "decomposition factor")};
    if (f.word.n_sites() != d.n_sites) throw ParseError("decomposition: factor " + f.word.str() + " has the wrong length");
    d.factors.push_back(f);
  }
  return d;
}

Json subgroup_chain_to_json(const SubgroupChain& chain) {
  Json j;
  j["n"] = chain.empty() ? 0 : chain[0].n_sites();
  Json levels = Json::array();
  for (const auto& g : chain.levels()) {
    Json words = Json::array();
    for (const auto& e : g.elements()) words.push_back(e.str());
    levels.push_back(std::move(words));
  }
  j["levels"] = std::move(levels);
  return j;
}

SubgroupChain subgroup_chain_from_json(const Json& j) {
  require_known_keys(j, {"n", "levels"}, "subgroup chain");
  const int n = get_as<int>(j, "n", "subgroup chain");
  if (n < 1 || n > PauliString::kMaxSites) throw ParseError("subgroup chain: n out of range");
  const auto levels = get_as<std::vector<std::vector<std::string>>>(j, "levels", "subgroup chain");
  std::vector<PauliGroup> groups;
  for (const auto& words : levels) {
    std::vector<PauliString> seed;
    for (const auto& w : words) {
      seed.push_back(PauliString::parse(w));
      if (seed.back().n_sites() != n) throw ParseError("subgroup chain: word " + w + " has the wrong length");
    }
    groups.push_back(group_closure(n, seed));
  }
  if (groups.empty() || !groups.back().is_trivial()) groups.emplace_back(n);
  try {
    return SubgroupChain(std::move(groups));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("subgroup chain: ") + e.what());
  }
}

Json unitary_to_json(const Matrix& u) {
  Json j;
  j["n"] = sites_for_dimension(u.rows());
  j["matrix"] = matrix_to_json(u);
  return j;
}

Matrix unitary_from_json(const Json& j) {
  require_known_keys(j, {"n", "matrix"}, "unitary");
  const int n = get_as<int>(j, "n", "unitary");
  if (n < 1 || n > kMaxDenseSites) throw ParseError("unitary: n out of range");
  if (!j.contains("matrix")) throw ParseError("unitary: missing key \"matrix\"");
  Matrix u = matrix_from_json(j.at("matrix"));
  if (u.rows() != (Eigen::Index{1} << n) || u.cols() != u.rows()) {
    throw ParseError("unitary: matrix is not 2^n x 2^n");
  }
  return u;
}

Json nmr_spec_to_json(const NmrSystemSpec& spec) {
  Json j;
  j["n"] = spec.n_spins;
  j["shifts_hz"] = spec.shifts_hz;
  j["couplings_hz"] = spec.couplings_hz;
  j["channels"] = spec.channels;
  j["weights"] = spec.weights;
  return j;
}

NmrSystemSpec nmr_spec_from_json(const Json& j) {
  require_known_keys(j, {"n", "shifts_hz", "couplings_hz", "channels", "weights"}, "NMR spec");
  NmrSystemSpec spec;
  spec.n_spins = get_as<int>(j, "n", "NMR spec");
  spec.shifts_hz = get_as<std::vector<double>>(j, "shifts_hz", "NMR spec");
  spec.couplings_hz = get_as<std::vector<std::vector<double>>>(j, "couplings_hz", "NMR spec");
  spec.channels = get_as<std::vector<std::vector<int>>>(j, "channels", "NMR spec");
  spec.weights = get_as<std::vector<double>>(j, "weights", "NMR spec");
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("NMR spec: ") + e.what());
  }
  return spec;
}

Json spectral_report_to_json(const SpectralReport& r) {
  Json j;
  j["eigenvalues"] = std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  j["parities"] = r.parities;
  j["eigenvectors"] = real_matrix_to_json(r.eigenvectors);
  j["mirror_time"] = r.mirror_time;
  j["global_phase"] = r.global_phase;
  j["witnesses"] = r.witnesses;
  j["max_phase_error"] = r.max_phase_error;
  j["degenerate"] = r.degenerate;
  j["parities_alternate"] = r.parities_alternate;
  j["satisfied"] = r.satisfied;
  return j;
}

Json transfer_report_to_json(const TransferReport& r) {
  Json j;
  j["mode"] = std::string(mode_name(r.mode));
  j["n"] = r.n_sites;
  j["source_sites"] = sites_json(r.source_sites);
  j["destination_sites"] = sites_json(r.destination_sites);
  j["fidelity"] = r.fidelity;
  j["correlation"] = r.correlation;
  if (r.bell_input) j["bell_input"] = *r.bell_input;
  if (r.bell_input) j["bell_output"] = r.bell_output ? Json(*r.bell_output) : Json(nullptr);
  if (r.bell_input) j["bell_overlap"] = r.bell_overlap;
  if (r.spectators_maximally_mixed) j["spectators_maximally_mixed"] = *r.spectators_maximally_mixed;
  j["anti_phase_decoded"] = r.anti_phase_decoded;
  Json phases = Json::array();
  for (const auto& p : r.sector_phases) phases.push_back(complex_to_json(p));
  j["sector_phases"] = std::move(phases);
  j["input"] = matrix_to_json(r.input);
  j["expected"] = matrix_to_json(r.expected);
  j["output"] = matrix_to_json(r.output);
  j["raw_reduced"] = matrix_to_json(r.raw_reduced);
  return j;
}

Json peel_trace_to_json(const PeelTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json j;
    j["level"] = s.level;
    j["word"] = s.word.str();
    j["peel_angle"] = s.angle;
    j["w"] = s.w;
    j["delta"] = s.delta;
    j["norm_before"] = s.norm_before;
    j["norm_after"] = s.norm_after;
    j["grid_fallback"] = s.grid_fallback;
    steps.push_back(std::move(j));
  }
  Json out;
  out["steps"] = std::move(steps);
  out["monotone"] = t.monotone();
  return out;
}

Json grape_result_to_json(const GrapeResult& r) {
  Json j;
  j["fidelity"] = r.fidelity;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["random_restart"] = r.random_restart;
  j["steps"] = r.pulse.steps();
  j["channels"] = r.pulse.channels();
  j["dt"] = r.pulse.dt;
  j["duration"] = r.pulse.duration();
  j["peak_amplitude_hz"] = r.pulse.peak_amplitude();
  j["trajectory"] = r.trajectory;
  return j;
}

std::string pulse_to_csv(const PulseSequence& pulse) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "step,channel,amp_x_hz,amp_y_hz\n";
  for (int k = 0; k < pulse.steps(); ++k) {
    for (int c = 0; c < pulse.channels(); ++c) {
      out << k + 1 << ',' << c + 1 << ',' << pulse.amp_x(k, c) << ',' << pulse.amp_y(k, c) << '\n';
    }
  }
  return out.str();
}

PulseSequence pulse_from_csv(std::string_view text, double dt) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("pulse CSV is empty");
  if (line.rfind("step,channel,amp_x_hz,amp_y_hz", 0) != 0) throw ParseError("pulse CSV header mismatch");
  struct Row {
    int step, channel;
    double ax, ay;
  };
  std::vector<Row> rows;
  int steps = 0;
  int channels = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    Row r{};
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> r.step >> c1 >> r.channel >> c2 >> r.ax >> c3 >> r.ay) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw ParseError("bad pulse CSV row: " + line);
    }
    if (r.step < 1 || r.channel < 1) throw ParseError("pulse CSV indices are 1-based");
    steps = std::max(steps, r.step);
    channels = std::max(channels, r.channel);
    rows.push_back(r);
  }
  PulseSequence p = PulseSequence::zeros(steps, channels, dt);
  if (rows.size() != static_cast<std::size_t>(steps) * static_cast<std::size_t>(channels)) {
    throw ParseError("pulse CSV does not cover every step and channel");
  }
  for (const auto& r : rows) {
    p.amp_x(r.step - 1, r.channel - 1) = r.ax;
    p.amp_y(r.step - 1, r.channel - 1) = r.ay;
  }
  return p;
}

}  // namespace mirrorchain::io
