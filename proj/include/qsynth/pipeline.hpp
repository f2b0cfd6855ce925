#ifndef QSYNTH_PIPELINE_HPP
#define QSYNTH_PIPELINE_HPP

#include <cstdint>

#include "qsynth/circuit.hpp"
#include "qsynth/domains.hpp"
#include "qsynth/model.hpp"
#include "qsynth/solver.hpp"

namespace qsynth {

struct SynthesisReport {
  bool feasible = false;
  bool optimal = false;
  Circuit circuit;          // empty unless feasible
  Metrics metrics;          // measured on the emitted circuit (reported)
  Metrics accounting;       // node-granular schedule metrics from the search
  uint64_t objective_value = 0;
  SolveStats stats;
};

// Lower, reduce, search, emit, measure. The circuit's entry registers hold
// the model variables in declaration order starting at qubit 0.
SynthesisReport synthesize(const Model& m, const Constraints& cons, Objective obj,
                           const SolveOptions& opts);

// True when the circuit acts on the entry registers like the model's gate
// level semantics (up to global phase) and returns every other qubit clean.
// Dense check: circuit qubit count is capped by the simulator.
bool verify_semantics(const Model& m, const Circuit& c, double tol = 1e-9);

}  // namespace qsynth

#endif
