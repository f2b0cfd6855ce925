#ifndef QSYNTH_QASM_HPP
#define QSYNTH_QASM_HPP

#include <stdexcept>
#include <string>

#include "qsynth/circuit.hpp"

namespace qsynth {

struct QasmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// OpenQASM 2.0 over the gate set {h, x, rz, cx}; one register "q".
std::string to_qasm(const Circuit& c);

// Parses the subset emitted by to_qasm.
Circuit parse_qasm(const std::string& text);

}  // namespace qsynth

#endif
