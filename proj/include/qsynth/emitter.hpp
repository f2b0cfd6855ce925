#ifndef QSYNTH_EMITTER_HPP
#define QSYNTH_EMITTER_HPP

#include "qsynth/circuit.hpp"
#include "qsynth/solver.hpp"

namespace qsynth {

// Assemble a solved schedule into a flat circuit: one library fragment per
// placed elementary node, generated on its committed physical qubits, in
// placement order. Gate counts equal the schedule's committed counts
// exactly; the measured depth is gate-granular and never exceeds the
// node-granular accounting depth.
Circuit emit(const Solution& s);

}  // namespace qsynth

#endif
