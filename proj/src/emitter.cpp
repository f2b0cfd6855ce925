#include "qsynth/emitter.hpp"

#include <stdexcept>

#include "qsynth/stdlib.hpp"

namespace qsynth {

Circuit emit(const Solution& s) {
  if (!s.feasible) throw std::logic_error("emit: no feasible schedule");
  Circuit c;
  c.num_qubits = s.accounting.width;
  for (const PlacedNode& p : s.order) {
    if (p.kind != NodeKind::Elementary) continue;
    c.append(generate(p.fn, p.tuple.variant, p.operands, p.aux));
  }
  return c;
}

}  // namespace qsynth
