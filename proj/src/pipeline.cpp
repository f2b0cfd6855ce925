#include "qsynth/pipeline.hpp"

#include "qsynth/callgraph.hpp"
#include "qsynth/emitter.hpp"
#include "qsynth/reference.hpp"
#include "qsynth/simulator.hpp"

namespace qsynth {

SynthesisReport synthesize(const Model& m, const Constraints& cons, Objective obj,
                           const SolveOptions& opts) {
  validate(m);
  Graph g = lower(m);
  const Solution s = solve(g, cons, obj, opts);
  SynthesisReport r;
  r.feasible = s.feasible;
  r.optimal = s.optimal;
  r.accounting = s.accounting;
  r.objective_value = s.objective_value;
  r.stats = s.stats;
  if (s.feasible) {
    r.circuit = emit(s);
    r.metrics = measure(r.circuit);
  }
  return r;
}

bool verify_semantics(const Model& m, const Circuit& c, double tol) {
  uint32_t entry = 0;
  for (const VarDecl& v : m.variables) entry += v.width;
  std::vector<uint32_t> functional(entry);
  for (uint32_t i = 0; i < entry; ++i) functional[i] = i;
  const uint32_t total = std::max(c.num_qubits, entry);
  const FunctionalBlock fb = functional_block(c, total, functional);
  if (fb.leak > tol) return false;
  return equal_up_to_phase(fb.op, reference_block(m).op, tol);
}

}  // namespace qsynth
