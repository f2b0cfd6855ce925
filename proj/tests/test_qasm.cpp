#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsynth/qasm.hpp"

using namespace qsynth;

TEST_CASE("emits the fixed header and gate lines") {
  Circuit c;
  c.num_qubits = 3;
  c.push(gate_h(0));
  c.push(gate_cx(0, 2));
  c.push(gate_rz(1, 0.25));
  std::string text = to_qasm(c);
  CHECK(text ==
        "OPENQASM 2.0;\n"
        "include \"qelib1.inc\";\n"
        "qreg q[3];\n"
        "h q[0];\n"
        "cx q[0],q[2];\n"
        "rz(0.25) q[1];\n");
}

TEST_CASE("round trip preserves gates, qubits and angles exactly") {
  Circuit c;
  c.num_qubits = 6;
  c.push(gate_h(5));
  c.push(gate_x(0));
  c.push(gate_rz(2, 1.0 / 3.0));
  c.push(gate_rz(3, -2.7182818284590451e-5));
  c.push(gate_cx(4, 1));
  Circuit back = parse_qasm(to_qasm(c));
  REQUIRE(back.num_qubits == c.num_qubits);
  REQUIRE(back.gates.size() == c.gates.size());
  for (size_t i = 0; i < c.gates.size(); i++) CHECK(back.gates[i] == c.gates[i]);
}

TEST_CASE("double round trip is byte identical") {
  Circuit c;
  c.num_qubits = 2;
  c.push(gate_rz(0, 0.1234567890123456789));
  c.push(gate_cx(0, 1));
  std::string once = to_qasm(c);
  std::string twice = to_qasm(parse_qasm(once));
  CHECK(once == twice);
}

TEST_CASE("parser accepts comments and whitespace") {
  Circuit c = parse_qasm(
      "OPENQASM 2.0;  // header\n"
      "include \"qelib1.inc\";\n"
      "qreg q[2];\n"
      "  h   q[1] ;\n"
      "// nothing\n"
      "cx q[0] , q[1];\n");
  REQUIRE(c.gates.size() == 2);
  CHECK(c.gates[0] == gate_h(1));
  CHECK(c.gates[1] == gate_cx(0, 1));
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_qasm("qreg q[2];"), QasmError);
  CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0; h q[0];"), QasmError);
  CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0; qreg q[1]; h q[5];"), QasmError);
  CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0; qreg q[2]; cz q[0],q[1];"), QasmError);
  CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[1],q[1];"), QasmError);
  CHECK_THROWS_AS(parse_qasm("OPENQASM 2.0; qreg q[2]; h q[0]"), QasmError);
}
