#include "qsynth/circuit.hpp"

#include <algorithm>

namespace qsynth {

Gate gate_h(uint32_t q) { return Gate{GateKind::H, q, 0, 0.0}; }
Gate gate_x(uint32_t q) { return Gate{GateKind::X, q, 0, 0.0}; }
Gate gate_rz(uint32_t q, double angle) { return Gate{GateKind::RZ, q, 0, angle}; }
Gate gate_cx(uint32_t c, uint32_t t) { return Gate{GateKind::CX, c, t, 0.0}; }

void Circuit::push(const Gate& g) {
  uint32_t hi = g.kind == GateKind::CX ? std::max(g.q0, g.q1) : g.q0;
  num_qubits = std::max(num_qubits, hi + 1);
  gates.push_back(g);
}

void Circuit::append(const Circuit& other) {
  num_qubits = std::max(num_qubits, other.num_qubits);
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Metrics measure(const Circuit& c) {
  Metrics m;
  std::vector<uint64_t> ready;
  for (const Gate& g : c.gates) {
    uint32_t hi = g.kind == GateKind::CX ? std::max(g.q0, g.q1) : g.q0;
    if (hi >= ready.size()) ready.resize(hi + 1, 0);
    uint64_t layer;
    if (g.kind == GateKind::CX) {
      layer = std::max(ready[g.q0], ready[g.q1]) + 1;
      ready[g.q0] = ready[g.q1] = layer;
      m.counts.cx++;
    } else {
      layer = ready[g.q0] + 1;
      ready[g.q0] = layer;
      m.counts.single++;
    }
    m.depth = std::max(m.depth, layer);
    m.width = std::max(m.width, hi + 1);
  }
  return m;
}

}  // namespace qsynth
