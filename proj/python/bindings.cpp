// pybind11 surface. Structured results cross the boundary as JSON text and
// are decoded on the Python side; matrices go through numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mirrorchain/chain.hpp"
#include "mirrorchain/decomposition.hpp"
#include "mirrorchain/errors.hpp"
#include "mirrorchain/grape.hpp"
#include "mirrorchain/io.hpp"
#include "mirrorchain/mirror.hpp"
#include "mirrorchain/pauli.hpp"
#include "mirrorchain/pauli_group.hpp"

namespace py = pybind11;
namespace mc = mirrorchain;
using mc::io::Json;

namespace {

mc::ChainSpec chain_from_text(const std::string& text) {
  return mc::io::chain_spec_from_json(Json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compiled core of the mirrorchain package";

  auto base = py::register_exception<mc::Error>(m, "Error");
  py::register_exception<mc::DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<mc::ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<mc::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<mc::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<mc::PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<mc::StallError>(m, "StallError", base.ptr());
  py::register_exception<mc::DecompositionError>(m, "DecompositionError", base.ptr());
  py::register_exception<mc::MetricError>(m, "MetricError", base.ptr());
  py::register_exception<mc::ParseError>(m, "ParseError", base.ptr());

  m.def("pauli_matrix", [](const std::string& word) { return mc::pauli_matrix(mc::PauliString::parse(word)); },
        py::arg("word"));
  m.def("pauli_product", [](const std::string& a, const std::string& b) {
    const auto p = mc::pauli_mul(mc::PauliString::parse(a), mc::PauliString::parse(b));
    return py::make_tuple(p.phase_str(), p.word.str());
  });
  m.def("engineered_couplings", &mc::engineered_couplings, py::arg("n"));
  m.def("mirror_unitary", &mc::engineered_mirror_unitary, py::arg("n"));
  m.def("chain_propagator_json", [](const std::string& spec, double t) {
    return mc::chain_propagator(chain_from_text(spec), t);
  });
  m.def("spectrum_json", [](const std::string& spec, double tau) {
    return mc::io::spectral_report_to_json(mc::check_mirror_condition(chain_from_text(spec), tau)).dump();
  });
  m.def("sector_phases", [](const mc::Matrix& u) { return mc::sector_phases(u); }, py::arg("u"));
  m.def("closed_form_json", [](int n) { return mc::io::decomposition_to_json(mc::closed_form(n)).dump(); });
  m.def("decompose_json", [](const mc::Matrix& u) {
    const auto r = mc::decompose(u);
    Json j;
    j["decomposition"] = mc::io::decomposition_to_json(r.decomposition);
    j["chain"] = mc::io::subgroup_chain_to_json(r.chain);
    j["monotone"] = r.trace.monotone();
    return j.dump();
  });
  m.def("reconstruct_json", [](const std::string& d) {
    return mc::reconstruct(mc::io::decomposition_from_json(Json::parse(d)));
  });
  m.def("unitary_fidelity", &mc::unitary_fidelity);
  m.def("transfer_bell_json", [](const std::string& spec, int i, int j, const std::string& kind,
                                 const std::string& mode) {
    return mc::io::transfer_report_to_json(
               mc::transfer_entangled(chain_from_text(spec), {i, j}, mc::parse_bell(kind), mc::parse_mode(mode)))
        .dump();
  });
  m.def("transfer_site_json", [](const std::string& spec, int site, const std::string& state) {
    return mc::io::transfer_report_to_json(
               mc::transfer_single(chain_from_text(spec), site, mc::single_site_state(state), mc::TransferMode::kPure))
        .dump();
  });
  m.def("grape_json", [](const std::string& system, const mc::Matrix& target, int steps, double dt, double cap,
                         int max_iterations, std::vector<double> rf_scales, std::uint64_t seed) {
    mc::GrapeConfig cfg;
    cfg.steps = steps;
    cfg.dt = dt;
    cfg.amplitude_cap_hz = cap;
    cfg.max_iterations = max_iterations;
    cfg.rf_scales = std::move(rf_scales);
    cfg.seed = seed;
    const auto r = mc::grape_optimize(mc::io::nmr_spec_from_json(Json::parse(system)), target, cfg);
    return py::make_tuple(mc::io::grape_result_to_json(r).dump(), r.pulse.amp_x, r.pulse.amp_y);
  });
}
