#ifndef QSYNTH_REFERENCE_HPP
#define QSYNTH_REFERENCE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsynth/model.hpp"
#include "qsynth/simulator.hpp"

namespace qsynth {

struct ReferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One primitive model action under a classical control context. Primitives
// act directly (dense or permutation), independent of any gate decomposition.
struct PrimOp {
  enum class Kind : uint8_t { H, X, RZ, CX, CPhase, AddConst };
  Kind kind = Kind::X;
  std::vector<uint32_t> qubits;  // AddConst: register bits, bit 0 first
  double angle = 0.0;
  uint64_t constant = 0;
  std::vector<std::pair<uint32_t, bool>> controls;  // (qubit, required bit)
};

struct ReferenceProgram {
  uint32_t total_qubits = 0;
  std::vector<uint32_t> entry_qubits;  // declared variables, bit 0 first
  std::vector<PrimOp> ops;
};

// Unrolls the model: repeats expanded, calls inlined, control contexts made
// explicit, inversion applied, first alternative of every select taken.
ReferenceProgram linearize(const Model& m);

void apply(StateVector& sv, const PrimOp& op);
void apply(StateVector& sv, const ReferenceProgram& p);

// Operator on the declared variables with locals traced out from |0>; leak
// is the largest amplitude left outside the clean-local subspace.
FunctionalBlock reference_block(const Model& m);

}  // namespace qsynth

#endif
