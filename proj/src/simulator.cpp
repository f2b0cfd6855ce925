#include "qsynth/simulator.hpp"

#include <cmath>

namespace qsynth {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_state_size(uint32_t n) {
  if (n > kMaxStateQubits) {
    throw SimError("statevector over " + std::to_string(kMaxStateQubits) + " qubits");
  }
}
}  // namespace

StateVector StateVector::basis(uint32_t num_qubits, uint64_t index) {
  check_state_size(num_qubits);
  StateVector sv;
  sv.num_qubits = num_qubits;
  sv.amp.assign(uint64_t{1} << num_qubits, cplx{0.0, 0.0});
  sv.amp[index] = 1.0;
  return sv;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& v : amp) s += std::norm(v);
  return std::sqrt(s);
}

void apply(StateVector& sv, const Gate& g) {
  const uint64_t n = sv.dim();
  switch (g.kind) {
    case GateKind::H: {
      const uint64_t bit = uint64_t{1} << g.q0;
      for (uint64_t i = 0; i < n; i++) {
        if (i & bit) continue;
        cplx a = sv.amp[i], b = sv.amp[i | bit];
        sv.amp[i] = kInvSqrt2 * (a + b);
        sv.amp[i | bit] = kInvSqrt2 * (a - b);
      }
      break;
    }
    case GateKind::X: {
      const uint64_t bit = uint64_t{1} << g.q0;
      for (uint64_t i = 0; i < n; i++) {
        if (i & bit) continue;
        std::swap(sv.amp[i], sv.amp[i | bit]);
      }
      break;
    }
    case GateKind::RZ: {
      const uint64_t bit = uint64_t{1} << g.q0;
      const cplx lo = std::polar(1.0, -g.angle / 2.0);
      const cplx hi = std::polar(1.0, g.angle / 2.0);
      for (uint64_t i = 0; i < n; i++) sv.amp[i] *= (i & bit) ? hi : lo;
      break;
    }
    case GateKind::CX: {
      const uint64_t cbit = uint64_t{1} << g.q0;
      const uint64_t tbit = uint64_t{1} << g.q1;
      for (uint64_t i = 0; i < n; i++) {
        if ((i & cbit) && !(i & tbit)) std::swap(sv.amp[i], sv.amp[i | tbit]);
      }
      break;
    }
  }
}

void apply(StateVector& sv, const Circuit& c) {
  if (c.num_qubits > sv.num_qubits) throw SimError("circuit wider than statevector");
  for (const Gate& g : c.gates) apply(sv, g);
}

Matrix Matrix::identity(uint64_t d) {
  Matrix m(d);
  for (uint64_t i = 0; i < d; i++) m.at(i, i) = 1.0;
  return m;
}

Matrix multiply(const Matrix& l, const Matrix& r) {
  if (l.dim != r.dim) throw SimError("matrix dimension mismatch");
  Matrix out(l.dim);
  for (uint64_t i = 0; i < l.dim; i++) {
    for (uint64_t k = 0; k < l.dim; k++) {
      const cplx v = l.at(i, k);
      if (v == cplx{0.0, 0.0}) continue;
      for (uint64_t j = 0; j < l.dim; j++) out.at(i, j) += v * r.at(k, j);
    }
  }
  return out;
}

Matrix dagger(const Matrix& m) {
  Matrix out(m.dim);
  for (uint64_t i = 0; i < m.dim; i++) {
    for (uint64_t j = 0; j < m.dim; j++) out.at(i, j) = std::conj(m.at(j, i));
  }
  return out;
}

Matrix unitary_of(const Circuit& c, uint32_t num_qubits) {
  if (num_qubits > kMaxUnitaryQubits) {
    throw SimError("unitary over " + std::to_string(kMaxUnitaryQubits) + " qubits");
  }
  const uint64_t d = uint64_t{1} << num_qubits;
  Matrix m(d);
  for (uint64_t col = 0; col < d; col++) {
    StateVector sv = StateVector::basis(num_qubits, col);
    apply(sv, c);
    for (uint64_t row = 0; row < d; row++) m.at(row, col) = sv.amp[row];
  }
  return m;
}

bool is_unitary(const Matrix& m, double tol) {
  Matrix p = multiply(dagger(m), m);
  for (uint64_t i = 0; i < m.dim; i++) {
    for (uint64_t j = 0; j < m.dim; j++) {
      cplx want = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      if (std::abs(p.at(i, j) - want) > tol) return false;
    }
  }
  return true;
}

double phase_distance(const Matrix& a, const Matrix& b) {
  if (a.dim != b.dim) throw SimError("matrix dimension mismatch");
  uint64_t best = 0;
  double best_mag = -1.0;
  for (uint64_t i = 0; i < a.a.size(); i++) {
    double mag = std::abs(a.a[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  cplx s{1.0, 0.0};
  if (best_mag > 0.0 && std::abs(b.a[best]) > 0.0) {
    s = (a.a[best] / b.a[best]);
    s /= std::abs(s);
  }
  double worst = 0.0;
  for (uint64_t i = 0; i < a.a.size(); i++) {
    worst = std::max(worst, std::abs(a.a[i] - s * b.a[i]));
  }
  return worst;
}

bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
  return phase_distance(a, b) <= tol;
}

FunctionalBlock functional_block(const Circuit& c, uint32_t total_qubits,
                                 const std::vector<uint32_t>& functional) {
  check_state_size(total_qubits);
  if (functional.size() > kMaxUnitaryQubits) throw SimError("functional block too wide");
  const uint64_t fdim = uint64_t{1} << functional.size();

  // Spread a functional-space index onto the physical qubit positions.
  auto embed = [&](uint64_t fidx) {
    uint64_t full = 0;
    for (size_t k = 0; k < functional.size(); k++) {
      if (fidx & (uint64_t{1} << k)) full |= uint64_t{1} << functional[k];
    }
    return full;
  };
  uint64_t fmask = 0;
  for (uint32_t q : functional) fmask |= uint64_t{1} << q;

  FunctionalBlock out;
  out.op = Matrix(fdim);
  for (uint64_t col = 0; col < fdim; col++) {
    StateVector sv = StateVector::basis(total_qubits, embed(col));
    apply(sv, c);
    for (uint64_t i = 0; i < sv.dim(); i++) {
      if ((i & ~fmask) != 0) {
        out.leak = std::max(out.leak, std::abs(sv.amp[i]));
        continue;
      }
      uint64_t fidx = 0;
      for (size_t k = 0; k < functional.size(); k++) {
        if (i & (uint64_t{1} << functional[k])) fidx |= uint64_t{1} << k;
      }
      out.op.at(fidx, col) = sv.amp[i];
    }
  }
  return out;
}

}  // namespace qsynth
