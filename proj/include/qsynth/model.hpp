#ifndef QSYNTH_MODEL_HPP
#define QSYNTH_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsynth/expr.hpp"

namespace qsynth {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VarDecl {
  std::string name;
  uint32_t width = 1;
};

enum class ParamKind : uint8_t { Qubit, QubitArray, Qnum };

struct Param {
  std::string name;
  ParamKind kind = ParamKind::QubitArray;
};

// One register reference: `x`, `x[i]` or the half-open slice `x[lo:hi]`.
struct Operand {
  std::string var;
  std::optional<Expr> index;
  std::optional<Expr> lo;
  std::optional<Expr> hi;
  std::string text() const;
};

Operand parse_operand(const std::string& text);

// A call argument is a concatenation of operands (usually just one).
using Arg = std::vector<Operand>;

struct Stmt;

struct CallStmt {
  std::string callee;
  std::vector<Arg> args;
  std::optional<Expr> value;  // add_const only
};

struct GateStmt {
  std::string gate;  // H X RZ CX CPhase
  std::vector<Operand> operands;
  double angle = 0.0;
  bool has_angle = false;
};

struct ControlStmt {
  Operand operand;
  Expr equals;
  std::vector<Stmt> body;
};

struct InvertStmt {
  std::vector<Stmt> body;
};

struct RepeatStmt {
  std::string index;
  Expr count;
  std::vector<Stmt> body;
};

// Interchangeable implementations of the same action; the synthesizer picks.
struct SelectStmt {
  std::vector<std::vector<Stmt>> alternatives;
};

struct WithinStmt {
  std::vector<Stmt> within;
  std::vector<Stmt> apply;
};

struct AllocStmt {
  std::string name;
  Expr width;
};

struct FreeStmt {
  std::string name;
};

using StmtBase = std::variant<CallStmt, GateStmt, ControlStmt, InvertStmt, RepeatStmt, SelectStmt,
                              WithinStmt, AllocStmt, FreeStmt>;

struct Stmt : StmtBase {
  using StmtBase::StmtBase;
};

struct Function {
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;
};

struct Model {
  std::string entry;
  std::vector<VarDecl> variables;
  std::vector<Function> functions;  // declaration order preserved
};

Model parse_model(const std::string& json_text);
std::string to_json(const Model& m);

// Structural checks: unique names, known callees, acyclic call graph, arity
// of entry binding and gate operands, add_const shape, constant empty slices.
void validate(const Model& m);

const Function* find_function(const Model& m, const std::string& name);

}  // namespace qsynth

#endif
