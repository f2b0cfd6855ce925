#ifndef QSYNTH_EXPR_HPP
#define QSYNTH_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsynth {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer expression over literals, loop indices and register lengths:
//   atom:   INT | IDENT | len(IDENT) | (expr)
//   power:  atom [** factor]            (right associative)
//   factor: - factor | power
//   term:   factor (('*' | '//') factor)*
//   expr:   term (('+' | '-') term)*
// Division is floor division with Python rounding semantics.
class Expr {
 public:
  enum class Kind : uint8_t { Literal, Var, Len, Add, Sub, Mul, FloorDiv, Pow, Neg };

  Expr() = default;
  static Expr literal(int64_t v);

  Kind kind() const { return kind_; }
  int64_t value() const { return value_; }
  const std::string& name() const { return name_; }
  const std::vector<Expr>& kids() const { return kids_; }
  // Source text, preserved for serialization.
  const std::string& text() const { return text_; }

  bool is_constant() const;

  friend Expr parse_expr(const std::string& text);
  friend struct ExprParser;

 private:
  Kind kind_ = Kind::Literal;
  int64_t value_ = 0;
  std::string name_;
  std::vector<Expr> kids_;
  std::string text_;
};

Expr parse_expr(const std::string& text);

struct ExprEnv {
  std::map<std::string, int64_t> vars;  // loop indices
  std::map<std::string, int64_t> lens;  // len() of bound registers
};

int64_t eval_expr(const Expr& e, const ExprEnv& env);

}  // namespace qsynth

#endif
