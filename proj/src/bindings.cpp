#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "qsynth/benchmarks.hpp"
#include "qsynth/pipeline.hpp"
#include "qsynth/qasm.hpp"

namespace py = pybind11;

namespace {

using namespace qsynth;

Objective objective_from(const std::string& s) {
  if (s == "none") return Objective::None;
  if (s == "width") return Objective::Width;
  if (s == "depth") return Objective::Depth;
  if (s == "cx") return Objective::Cx;
  throw ModelError("unknown objective: " + s);
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["width"] = m.width;
  d["depth"] = m.depth;
  d["cx"] = m.counts.cx;
  d["single"] = m.counts.single;
  d["total"] = m.counts.total();
  return d;
}

py::dict synthesize_py(const std::string& model_json, const std::string& objective,
                       std::optional<uint32_t> max_width, std::optional<uint64_t> max_depth,
                       std::optional<uint64_t> max_cx, std::optional<uint64_t> max_single,
                       uint64_t seed, double timeout_s, uint64_t max_decisions, bool use_reducer) {
  const Model m = parse_model(model_json);
  Constraints cons;
  cons.max_width = max_width;
  cons.max_depth = max_depth;
  cons.max_cx = max_cx;
  cons.max_single = max_single;
  SolveOptions opts;
  opts.seed = seed;
  opts.budget.max_wall_ms = timeout_s * 1000.0;
  opts.budget.max_decisions = max_decisions;
  opts.use_reducer = use_reducer;
  const SynthesisReport r = synthesize(m, cons, objective_from(objective), opts);

  py::dict d;
  d["feasible"] = r.feasible;
  d["optimal"] = r.optimal;
  d["objective_value"] = r.objective_value;
  d["qasm"] = r.feasible ? to_qasm(r.circuit) : std::string();
  d["qubits"] = r.circuit.num_qubits;
  d["metrics"] = metrics_dict(r.metrics);
  d["accounting"] = metrics_dict(r.accounting);
  py::dict st;
  st["decisions"] = r.stats.decisions;
  st["propagations"] = r.stats.propagations;
  st["leaves"] = r.stats.leaves;
  st["expansions"] = r.stats.expansions;
  st["exhausted"] = r.stats.exhausted;
  d["stats"] = st;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resource-aware synthesis of gate-level circuits from high-level models";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<SimError>(m, "SimError", PyExc_ValueError);

  m.def(
      "validate_model",
      [](const std::string& model_json) {
        Model mo = parse_model(model_json);
        validate(mo);
        return to_json(mo);
      },
      py::arg("model_json"), "Parse and validate a model; returns its normalized JSON.");

  m.def("synthesize", &synthesize_py, py::arg("model_json"), py::arg("objective") = "none",
        py::arg("max_width") = py::none(), py::arg("max_depth") = py::none(),
        py::arg("max_cx") = py::none(), py::arg("max_single") = py::none(), py::arg("seed") = 0,
        py::arg("timeout_s") = 1000.0, py::arg("max_decisions") = 2'000'000,
        py::arg("use_reducer") = true,
        "Search for a circuit meeting the constraints; returns a result dict with QASM and "
        "metrics.");

  m.def(
      "verify",
      [](const std::string& model_json, const std::string& qasm, double tol) {
        return verify_semantics(parse_model(model_json), parse_qasm(qasm), tol);
      },
      py::arg("model_json"), py::arg("qasm"), py::arg("tol") = 1e-9,
      "Densely check a QASM circuit against the model's semantics.");

  m.def(
      "measure",
      [](const std::string& qasm) { return metrics_dict(measure(parse_qasm(qasm))); },
      py::arg("qasm"), "Width, depth and gate counts of a QASM circuit.");

  m.def(
      "walk_model", [](uint32_t n) { return to_json(build_walk_model(n)); }, py::arg("n"),
      "Coined walk step on a ring of 2^n positions.");
  m.def(
      "encoding_model", [](uint32_t n) { return to_json(build_block_encoding_model(n)); },
      py::arg("n"), "Unitary block holding the non-cyclic hopping operator on 2^n points.");
  m.def(
      "iterates_model",
      [](uint32_t n, const std::vector<double>& phases) {
        return to_json(build_qsvt_model(n, phases));
      },
      py::arg("n"), py::arg("phases"), "Alternating phased iterates over the hopping encoding.");
  m.def("random_phases", &random_phases, py::arg("count"), py::arg("seed"),
        "Deterministic phase stream in [0, 2*pi).");
}
