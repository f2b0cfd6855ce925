#ifndef QSYNTH_SIMULATOR_HPP
#define QSYNTH_SIMULATOR_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsynth/circuit.hpp"

namespace qsynth {

using cplx = std::complex<double>;

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr uint32_t kMaxStateQubits = 20;
inline constexpr uint32_t kMaxUnitaryQubits = 12;
inline constexpr double kSimTol = 1e-9;

// Dense statevector; qubit k is bit k of the index (qubit 0 = LSB).
struct StateVector {
  uint32_t num_qubits = 0;
  std::vector<cplx> amp;

  static StateVector basis(uint32_t num_qubits, uint64_t index);
  uint64_t dim() const { return uint64_t{1} << num_qubits; }
  double norm() const;
};

void apply(StateVector& sv, const Gate& g);
void apply(StateVector& sv, const Circuit& c);

// Dense square matrix, row-major.
struct Matrix {
  uint64_t dim = 0;
  std::vector<cplx> a;

  Matrix() = default;
  explicit Matrix(uint64_t d) : dim(d), a(d * d) {}
  cplx& at(uint64_t r, uint64_t c) { return a[r * dim + c]; }
  const cplx& at(uint64_t r, uint64_t c) const { return a[r * dim + c]; }
  static Matrix identity(uint64_t d);
};

Matrix multiply(const Matrix& l, const Matrix& r);
Matrix dagger(const Matrix& m);

// Column k = circuit applied to basis state k.
Matrix unitary_of(const Circuit& c, uint32_t num_qubits);

bool is_unitary(const Matrix& m, double tol = kSimTol);

// Max |a - s*b| over entries, with unit scalar s fitted on a's largest entry.
double phase_distance(const Matrix& a, const Matrix& b);
bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol = kSimTol);

// Operator restricted to the listed qubits, all other qubits |0> in and out.
// `leak` reports the largest amplitude left outside that subspace; circuits
// honouring the aux discipline have leak ~ 0 and a unitary `op`.
struct FunctionalBlock {
  Matrix op;
  double leak = 0.0;
};
FunctionalBlock functional_block(const Circuit& c, uint32_t total_qubits,
                                 const std::vector<uint32_t>& functional);

}  // namespace qsynth

#endif
