#include "qsynth/qasm.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace qsynth {

namespace {

std::string format_angle(double a) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", a);
  return buf;
}

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') line++;
    pos++;
  }
  void skip_ws() {
    while (!done()) {
      char ch = peek();
      if (ch == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
        while (!done() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw QasmError("qasm parse error at line " + std::to_string(line) + ": " + msg);
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                       peek() == '.')) {
      advance();
    }
    if (start == pos) fail("expected identifier");
    return text.substr(start, pos - start);
  }
  void expect(char ch) {
    skip_ws();
    if (done() || peek() != ch) fail(std::string("expected '") + ch + "'");
    advance();
  }
  bool accept(char ch) {
    skip_ws();
    if (!done() && peek() == ch) {
      advance();
      return true;
    }
    return false;
  }
  uint32_t index() {
    skip_ws();
    size_t start = pos;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (start == pos) fail("expected integer");
    return static_cast<uint32_t>(std::strtoul(text.substr(start, pos - start).c_str(), nullptr, 10));
  }
  double number() {
    skip_ws();
    size_t start = pos;
    while (!done() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                       peek() == '-' || peek() == '+' || peek() == 'e' || peek() == 'E')) {
      advance();
    }
    if (start == pos) fail("expected number");
    return std::strtod(text.substr(start, pos - start).c_str(), nullptr);
  }
};

}  // namespace

std::string to_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.num_qubits << "];\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::H:
        out << "h q[" << g.q0 << "];\n";
        break;
      case GateKind::X:
        out << "x q[" << g.q0 << "];\n";
        break;
      case GateKind::RZ:
        out << "rz(" << format_angle(g.angle) << ") q[" << g.q0 << "];\n";
        break;
      case GateKind::CX:
        out << "cx q[" << g.q0 << "],q[" << g.q1 << "];\n";
        break;
    }
  }
  return out.str();
}

Circuit parse_qasm(const std::string& text) {
  Cursor cur{text};
  cur.skip_ws();
  if (cur.ident() != "OPENQASM") cur.fail("missing OPENQASM header");
  cur.number();
  cur.expect(';');

  Circuit c;
  bool saw_qreg = false;
  while (true) {
    cur.skip_ws();
    if (cur.done()) break;
    if (cur.peek() == 'i' && text.compare(cur.pos, 7, "include") == 0) {
      while (!cur.done() && cur.peek() != ';') cur.advance();
      cur.expect(';');
      continue;
    }
    std::string word = cur.ident();
    if (word == "qreg") {
      std::string reg = cur.ident();
      if (reg != "q") cur.fail("expected register 'q'");
      cur.expect('[');
      c.num_qubits = cur.index();
      cur.expect(']');
      cur.expect(';');
      saw_qreg = true;
      continue;
    }
    if (!saw_qreg) cur.fail("gate before qreg");
    auto qubit = [&]() {
      std::string reg = cur.ident();
      if (reg != "q") cur.fail("unknown register '" + reg + "'");
      cur.expect('[');
      uint32_t q = cur.index();
      cur.expect(']');
      if (q >= c.num_qubits) cur.fail("qubit index out of range");
      return q;
    };
    if (word == "h") {
      c.gates.push_back(gate_h(qubit()));
    } else if (word == "x") {
      c.gates.push_back(gate_x(qubit()));
    } else if (word == "rz") {
      cur.expect('(');
      double angle = cur.number();
      cur.expect(')');
      c.gates.push_back(gate_rz(qubit(), angle));
    } else if (word == "cx") {
      uint32_t a = qubit();
      cur.expect(',');
      uint32_t b = qubit();
      if (a == b) cur.fail("cx with equal qubits");
      c.gates.push_back(gate_cx(a, b));
    } else {
      cur.fail("unsupported statement '" + word + "'");
    }
    cur.expect(';');
  }
  if (!saw_qreg) cur.fail("missing qreg");
  return c;
}

}  // namespace qsynth
