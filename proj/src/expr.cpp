#include "qsynth/expr.hpp"

#include <cctype>
#include <limits>

namespace qsynth {

struct ExprParser {
  const std::string& src;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("expression error at offset " + std::to_string(pos) + " in '" + src +
                    "': " + what);
  }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (src.compare(pos, tok.size(), tok) != 0) return false;
    // '*' must not swallow the first half of '**', nor '/' half of '//'.
    if (tok == "*" && pos + 1 < src.size() && src[pos + 1] == '*') return false;
    pos += tok.size();
    return true;
  }

  bool peek_ident_start() {
    skip_ws();
    return pos < src.size() &&
           (std::isalpha(static_cast<unsigned char>(src[pos])) || src[pos] == '_');
  }

  std::string ident() {
    skip_ws();
    if (pos >= src.size() ||
        (!std::isalpha(static_cast<unsigned char>(src[pos])) && src[pos] != '_'))
      fail("expected identifier");
    size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    return src.substr(start, pos - start);
  }

  Expr make(Expr::Kind k, std::vector<Expr> kids) {
    Expr e;
    e.kind_ = k;
    e.kids_ = std::move(kids);
    return e;
  }

  Expr atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      Expr e;
      e.kind_ = Expr::Kind::Literal;
      try {
        e.value_ = std::stoll(src.substr(start, pos - start));
      } catch (const std::out_of_range&) {
        fail("integer literal out of range");
      }
      return e;
    }
    if (c == '(') {
      ++pos;
      Expr e = expr();
      skip_ws();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::string id = ident();
      if (id == "len") {
        skip_ws();
        if (pos >= src.size() || src[pos] != '(') fail("expected '(' after len");
        ++pos;
        const std::string arg = ident();
        skip_ws();
        if (pos >= src.size() || src[pos] != ')') fail("expected ')' after len argument");
        ++pos;
        Expr e;
        e.kind_ = Expr::Kind::Len;
        e.name_ = arg;
        return e;
      }
      Expr e;
      e.kind_ = Expr::Kind::Var;
      e.name_ = id;
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr power() {
    Expr base = atom();
    if (eat("**")) {
      Expr exp = factor();
      return make(Expr::Kind::Pow, {std::move(base), std::move(exp)});
    }
    return base;
  }

  Expr factor() {
    if (eat("-")) return make(Expr::Kind::Neg, {factor()});
    return power();
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (eat("*")) {
        lhs = make(Expr::Kind::Mul, {std::move(lhs), factor()});
      } else if (eat("//")) {
        lhs = make(Expr::Kind::FloorDiv, {std::move(lhs), factor()});
      } else {
        skip_ws();
        if (pos < src.size() && src[pos] == '/') fail("single '/' is not supported, use '//'");
        return lhs;
      }
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (eat("+")) {
        lhs = make(Expr::Kind::Add, {std::move(lhs), term()});
      } else if (eat("-")) {
        lhs = make(Expr::Kind::Sub, {std::move(lhs), term()});
      } else {
        return lhs;
      }
    }
  }
};

namespace {

int64_t checked_mul(int64_t a, int64_t b) {
  const __int128 r = static_cast<__int128>(a) * static_cast<__int128>(b);
  if (r > std::numeric_limits<int64_t>::max() || r < std::numeric_limits<int64_t>::min())
    throw ExprError("integer overflow in expression");
  return static_cast<int64_t>(r);
}

}  // namespace

Expr Expr::literal(int64_t v) {
  Expr e;
  e.kind_ = Kind::Literal;
  e.value_ = v;
  e.text_ = std::to_string(v);
  return e;
}

bool Expr::is_constant() const {
  if (kind_ == Kind::Var || kind_ == Kind::Len) return false;
  for (const Expr& k : kids_)
    if (!k.is_constant()) return false;
  return true;
}

Expr parse_expr(const std::string& text) {
  ExprParser p{text};
  Expr e = p.expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  e.text_ = text;
  return e;
}

int64_t eval_expr(const Expr& e, const ExprEnv& env) {
  switch (e.kind()) {
    case Expr::Kind::Literal:
      return e.value();
    case Expr::Kind::Var: {
      auto it = env.vars.find(e.name());
      if (it == env.vars.end()) throw ExprError("unknown name '" + e.name() + "'");
      return it->second;
    }
    case Expr::Kind::Len: {
      auto it = env.lens.find(e.name());
      if (it == env.lens.end()) throw ExprError("len of unknown register '" + e.name() + "'");
      return it->second;
    }
    case Expr::Kind::Add:
      return eval_expr(e.kids()[0], env) + eval_expr(e.kids()[1], env);
    case Expr::Kind::Sub:
      return eval_expr(e.kids()[0], env) - eval_expr(e.kids()[1], env);
    case Expr::Kind::Mul:
      return checked_mul(eval_expr(e.kids()[0], env), eval_expr(e.kids()[1], env));
    case Expr::Kind::FloorDiv: {
      const int64_t a = eval_expr(e.kids()[0], env);
      const int64_t b = eval_expr(e.kids()[1], env);
      if (b == 0) throw ExprError("division by zero");
      int64_t q = a / b;
      if ((a % b != 0) && ((a < 0) != (b < 0))) --q;  // floor toward -inf
      return q;
    }
    case Expr::Kind::Pow: {
      const int64_t base = eval_expr(e.kids()[0], env);
      const int64_t exp = eval_expr(e.kids()[1], env);
      if (exp < 0) throw ExprError("negative exponent");
      int64_t r = 1;
      for (int64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
      return r;
    }
    case Expr::Kind::Neg:
      return -eval_expr(e.kids()[0], env);
  }
  throw ExprError("corrupt expression node");
}

}  // namespace qsynth
