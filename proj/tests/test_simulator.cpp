#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qsynth/simulator.hpp"

using namespace qsynth;

namespace {
const double kS2 = 1.0 / std::sqrt(2.0);

Matrix literal2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  m.at(1, 0) = c;
  m.at(1, 1) = d;
  return m;
}

Circuit random_circuit(uint32_t n, int gates, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Circuit c;
  c.num_qubits = n;
  for (int i = 0; i < gates; i++) {
    switch (rng() % 4) {
      case 0:
        c.push(gate_h(rng() % n));
        break;
      case 1:
        c.push(gate_x(rng() % n));
        break;
      case 2:
        c.push(gate_rz(rng() % n, (double)(rng() % 1000) / 321.0));
        break;
      default: {
        uint32_t a = rng() % n, b = rng() % n;
        if (a == b) b = (a + 1) % n;
        c.push(gate_cx(a, b));
      }
    }
  }
  return c;
}
}  // namespace

TEST_CASE("single qubit gate matrices match the literals") {
  Circuit h;
  h.push(gate_h(0));
  CHECK(phase_distance(literal2(kS2, kS2, kS2, -kS2), unitary_of(h, 1)) < 1e-15);

  Circuit x;
  x.push(gate_x(0));
  CHECK(phase_distance(literal2(0, 1, 1, 0), unitary_of(x, 1)) < 1e-15);

  // rz(t) = diag(e^{-it/2}, e^{it/2})
  double t = 0.73;
  Circuit rz;
  rz.push(gate_rz(0, t));
  Matrix want = literal2(std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2));
  CHECK(phase_distance(want, unitary_of(rz, 1)) < 1e-15);
}

TEST_CASE("cx permutes exactly the control-on states") {
  Circuit c;
  c.push(gate_cx(0, 1));
  Matrix m = unitary_of(c, 2);
  // basis order: |q1 q0> as bits, index = q0 + 2*q1
  Matrix want(4);
  want.at(0, 0) = 1;  // |00> -> |00>
  want.at(3, 1) = 1;  // |01> -> |11>
  want.at(2, 2) = 1;  // |10> -> |10>
  want.at(1, 3) = 1;  // |11> -> |01>
  CHECK(phase_distance(want, m) < 1e-15);
}

TEST_CASE("norm is preserved by random circuits") {
  StateVector sv = StateVector::basis(5, 13);
  apply(sv, random_circuit(5, 200, 42));
  CHECK(std::abs(sv.norm() - 1.0) < 1e-12);
}

TEST_CASE("random circuits are unitary") {
  Circuit c = random_circuit(4, 60, 7);
  CHECK(is_unitary(unitary_of(c, 4)));
}

TEST_CASE("equal_up_to_phase ignores a global phase and nothing else") {
  Circuit c = random_circuit(3, 40, 11);
  Matrix m = unitary_of(c, 3);
  Matrix shifted = m;
  cplx ph = std::polar(1.0, 1.234);
  for (auto& v : shifted.a) v *= ph;
  CHECK(equal_up_to_phase(m, shifted));

  Matrix broken = m;
  broken.at(0, 0) += 0.001;
  CHECK(!equal_up_to_phase(m, broken, 1e-6));
}

TEST_CASE("functional_block extracts the action on a sub register") {
  // x on qubit 2 (aux) is a leak; cx(0->1) with aux untouched is clean.
  Circuit clean;
  clean.num_qubits = 3;
  clean.push(gate_cx(0, 1));
  FunctionalBlock fb = functional_block(clean, 3, {0, 1});
  CHECK(fb.leak < 1e-15);
  Matrix want(4);
  want.at(0, 0) = 1;
  want.at(3, 1) = 1;
  want.at(2, 2) = 1;
  want.at(1, 3) = 1;
  CHECK(phase_distance(want, fb.op) < 1e-15);

  Circuit leaky;
  leaky.num_qubits = 3;
  leaky.push(gate_x(2));
  FunctionalBlock bad = functional_block(leaky, 3, {0, 1});
  CHECK(bad.leak > 0.5);
}

TEST_CASE("functional_block maps sub register bit k to list position k") {
  // x on qubit 3; functional = {3, 1}: position 0 toggles.
  Circuit c;
  c.num_qubits = 4;
  c.push(gate_x(3));
  FunctionalBlock fb = functional_block(c, 4, {3, 1});
  CHECK(fb.leak < 1e-15);
  CHECK(std::abs(fb.op.at(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(fb.op.at(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(fb.op.at(3, 2) - 1.0) < 1e-15);
}

TEST_CASE("size caps are enforced") {
  CHECK_THROWS_AS(StateVector::basis(21, 0), SimError);
  Circuit c;
  CHECK_THROWS_AS(unitary_of(c, 13), SimError);
}
