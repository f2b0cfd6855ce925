#ifndef QSYNTH_CIRCUIT_HPP
#define QSYNTH_CIRCUIT_HPP

#include <cstdint>
#include <vector>

namespace qsynth {

enum class GateKind : uint8_t { H, X, RZ, CX };

// One primitive gate. `angle` is meaningful for RZ only, `q1` for CX only.
struct Gate {
  GateKind kind = GateKind::H;
  uint32_t q0 = 0;
  uint32_t q1 = 0;
  double angle = 0.0;

  bool operator==(const Gate&) const = default;
};

Gate gate_h(uint32_t q);
Gate gate_x(uint32_t q);
Gate gate_rz(uint32_t q, double angle);
Gate gate_cx(uint32_t c, uint32_t t);

// Flat gate list over physical qubits.
struct Circuit {
  uint32_t num_qubits = 0;
  std::vector<Gate> gates;

  void push(const Gate& g);
  void append(const Circuit& other);
};

// Tracked gate classes: entangling CX vs single-qubit.
struct GateCounts {
  uint64_t cx = 0;
  uint64_t single = 0;

  uint64_t total() const { return cx + single; }
  GateCounts& operator+=(const GateCounts& o) {
    cx += o.cx;
    single += o.single;
    return *this;
  }
  bool operator==(const GateCounts&) const = default;
};

struct Metrics {
  uint32_t width = 0;  // max touched qubit index + 1
  uint64_t depth = 0;  // ASAP layering, one slot per gate
  GateCounts counts;

  bool operator==(const Metrics&) const = default;
};

Metrics measure(const Circuit& c);

}  // namespace qsynth

#endif
