#include "qsynth/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "json.hpp"

namespace qsynth {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ModelError(path + ": " + what);
}

Expr expr_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Expr::literal(j.get<int64_t>());
  if (j.is_string()) {
    try {
      return parse_expr(j.get<std::string>());
    } catch (const ExprError& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected integer or expression string");
}

json expr_to_json(const Expr& e) {
  if (e.kind() == Expr::Kind::Literal) return json(e.value());
  return json(e.text());
}

std::vector<Stmt> body_from_json(const json& j, const std::string& path);

Stmt stmt_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "statement must be an object");
  if (j.contains("call")) {
    CallStmt s;
    s.callee = j.at("call").get<std::string>();
    if (!j.contains("args") || !j.at("args").is_array()) fail(path, "call needs an 'args' array");
    for (size_t i = 0; i < j.at("args").size(); ++i) {
      const json& a = j.at("args")[i];
      const std::string apath = path + ".args[" + std::to_string(i) + "]";
      Arg arg;
      try {
        if (a.is_string()) {
          arg.push_back(parse_operand(a.get<std::string>()));
        } else if (a.is_array()) {
          for (const json& part : a) arg.push_back(parse_operand(part.get<std::string>()));
        } else {
          fail(apath, "argument must be an operand string or array of operand strings");
        }
      } catch (const ExprError& e) {
        fail(apath, e.what());
      }
      s.args.push_back(std::move(arg));
    }
    if (j.contains("value")) s.value = expr_from_json(j.at("value"), path + ".value");
    return s;
  }
  if (j.contains("gate")) {
    GateStmt s;
    s.gate = j.at("gate").get<std::string>();
    if (!j.contains("operands") || !j.at("operands").is_array())
      fail(path, "gate needs an 'operands' array");
    for (const json& o : j.at("operands")) {
      try {
        s.operands.push_back(parse_operand(o.get<std::string>()));
      } catch (const ExprError& e) {
        fail(path + ".operands", e.what());
      }
    }
    if (j.contains("angle")) {
      if (!j.at("angle").is_number()) fail(path, "angle must be a number");
      s.angle = j.at("angle").get<double>();
      s.has_angle = true;
    }
    return s;
  }
  if (j.contains("control")) {
    const json& c = j.at("control");
    if (!c.is_object() || !c.contains("operand") || !c.contains("equals"))
      fail(path, "control needs 'operand' and 'equals'");
    ControlStmt s;
    try {
      s.operand = parse_operand(c.at("operand").get<std::string>());
    } catch (const ExprError& e) {
      fail(path + ".control.operand", e.what());
    }
    s.equals = expr_from_json(c.at("equals"), path + ".control.equals");
    if (!j.contains("body")) fail(path, "control needs a 'body'");
    s.body = body_from_json(j.at("body"), path + ".body");
    return s;
  }
  if (j.contains("invert")) {
    InvertStmt s;
    s.body = body_from_json(j.at("invert"), path + ".invert");
    return s;
  }
  if (j.contains("repeat")) {
    const json& r = j.at("repeat");
    if (!r.is_object() || !r.contains("index") || !r.contains("count") || !r.contains("body"))
      fail(path, "repeat needs 'index', 'count' and 'body'");
    RepeatStmt s;
    s.index = r.at("index").get<std::string>();
    s.count = expr_from_json(r.at("count"), path + ".repeat.count");
    s.body = body_from_json(r.at("body"), path + ".repeat.body");
    return s;
  }
  if (j.contains("select")) {
    const json& alts = j.at("select");
    if (!alts.is_array()) fail(path, "select must be an array of alternative bodies");
    SelectStmt s;
    for (size_t i = 0; i < alts.size(); ++i)
      s.alternatives.push_back(
          body_from_json(alts[i], path + ".select[" + std::to_string(i) + "]"));
    return s;
  }
  if (j.contains("within")) {
    if (!j.contains("apply")) fail(path, "within needs a matching 'apply'");
    WithinStmt s;
    s.within = body_from_json(j.at("within"), path + ".within");
    s.apply = body_from_json(j.at("apply"), path + ".apply");
    return s;
  }
  if (j.contains("allocate")) {
    const json& a = j.at("allocate");
    if (!a.is_object() || !a.contains("name") || !a.contains("width"))
      fail(path, "allocate needs 'name' and 'width'");
    AllocStmt s;
    s.name = a.at("name").get<std::string>();
    s.width = expr_from_json(a.at("width"), path + ".allocate.width");
    return s;
  }
  if (j.contains("free")) {
    FreeStmt s;
    s.name = j.at("free").get<std::string>();
    return s;
  }
  fail(path, "unrecognized statement");
}

std::vector<Stmt> body_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "body must be an array");
  std::vector<Stmt> body;
  for (size_t i = 0; i < j.size(); ++i)
    body.push_back(stmt_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  return body;
}

json body_to_json(const std::vector<Stmt>& body);

json stmt_to_json(const Stmt& s) {
  json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CallStmt>) {
          j["call"] = v.callee;
          json args = json::array();
          for (const Arg& a : v.args) {
            if (a.size() == 1) {
              args.push_back(a[0].text());
            } else {
              json parts = json::array();
              for (const Operand& o : a) parts.push_back(o.text());
              args.push_back(parts);
            }
          }
          j["args"] = args;
          if (v.value) j["value"] = expr_to_json(*v.value);
        } else if constexpr (std::is_same_v<T, GateStmt>) {
          j["gate"] = v.gate;
          json ops = json::array();
          for (const Operand& o : v.operands) ops.push_back(o.text());
          j["operands"] = ops;
          if (v.has_angle) j["angle"] = v.angle;
        } else if constexpr (std::is_same_v<T, ControlStmt>) {
          j["control"] = {{"operand", v.operand.text()}, {"equals", expr_to_json(v.equals)}};
          j["body"] = body_to_json(v.body);
        } else if constexpr (std::is_same_v<T, InvertStmt>) {
          j["invert"] = body_to_json(v.body);
        } else if constexpr (std::is_same_v<T, RepeatStmt>) {
          j["repeat"] = {
              {"index", v.index}, {"count", expr_to_json(v.count)}, {"body", body_to_json(v.body)}};
        } else if constexpr (std::is_same_v<T, SelectStmt>) {
          json alts = json::array();
          for (const auto& alt : v.alternatives) alts.push_back(body_to_json(alt));
          j["select"] = alts;
        } else if constexpr (std::is_same_v<T, WithinStmt>) {
          j["within"] = body_to_json(v.within);
          j["apply"] = body_to_json(v.apply);
        } else if constexpr (std::is_same_v<T, AllocStmt>) {
          j["allocate"] = {{"name", v.name}, {"width", expr_to_json(v.width)}};
        } else if constexpr (std::is_same_v<T, FreeStmt>) {
          j["free"] = v.name;
        }
      },
      static_cast<const StmtBase&>(s));
  return j;
}

json body_to_json(const std::vector<Stmt>& body) {
  json arr = json::array();
  for (const Stmt& s : body) arr.push_back(stmt_to_json(s));
  return arr;
}

ParamKind kind_from_string(const std::string& s, const std::string& path) {
  if (s == "qubit") return ParamKind::Qubit;
  if (s == "qubit_array") return ParamKind::QubitArray;
  if (s == "qnum") return ParamKind::Qnum;
  fail(path, "unknown param kind '" + s + "'");
}

std::string kind_to_string(ParamKind k) {
  switch (k) {
    case ParamKind::Qubit:
      return "qubit";
    case ParamKind::QubitArray:
      return "qubit_array";
    case ParamKind::Qnum:
      return "qnum";
  }
  return "qubit_array";
}

}  // namespace

std::string Operand::text() const {
  std::string s = var;
  if (index) {
    s += "[" + index->text() + "]";
  } else if (lo) {
    s += "[" + lo->text() + ":" + hi->text() + "]";
  }
  return s;
}

Operand parse_operand(const std::string& text) {
  size_t i = 0;
  while (i < text.size() && text[i] != '[') ++i;
  Operand op;
  op.var = text.substr(0, i);
  // Trim surrounding whitespace of the bare name.
  while (!op.var.empty() && std::isspace(static_cast<unsigned char>(op.var.back())))
    op.var.pop_back();
  size_t lead = 0;
  while (lead < op.var.size() && std::isspace(static_cast<unsigned char>(op.var[lead]))) ++lead;
  op.var = op.var.substr(lead);
  if (op.var.empty()) throw ExprError("operand '" + text + "' has no register name");
  for (char c : op.var)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw ExprError("invalid register name in operand '" + text + "'");
  if (i == text.size()) return op;
  if (text.back() != ']') throw ExprError("operand '" + text + "' has an unterminated index");
  const std::string inner = text.substr(i + 1, text.size() - i - 2);
  const size_t colon = inner.find(':');
  if (colon == std::string::npos) {
    op.index = parse_expr(inner);
    if (op.index->is_constant() && eval_expr(*op.index, {}) < 0)
      throw ExprError("negative index in operand '" + text + "'");
    return op;
  }
  op.lo = parse_expr(inner.substr(0, colon));
  op.hi = parse_expr(inner.substr(colon + 1));
  if (op.lo->is_constant() && op.hi->is_constant()) {
    const int64_t lo = eval_expr(*op.lo, {});
    const int64_t hi = eval_expr(*op.hi, {});
    if (lo < 0) throw ExprError("negative slice start in operand '" + text + "'");
    if (hi <= lo) throw ExprError("empty slice in operand '" + text + "'");
  }
  return op;
}

Model parse_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid json: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("model must be a json object");
  Model m;
  try {
    m.entry = j.at("entry").get<std::string>();
  } catch (const json::exception&) {
    throw ModelError("model needs a string 'entry'");
  }
  if (!j.contains("variables") || !j.at("variables").is_array())
    throw ModelError("model needs a 'variables' array");
  for (size_t i = 0; i < j.at("variables").size(); ++i) {
    const json& v = j.at("variables")[i];
    const std::string path = "variables[" + std::to_string(i) + "]";
    if (!v.is_object() || !v.contains("name") || !v.contains("width"))
      fail(path, "variable needs 'name' and 'width'");
    if (!v.at("width").is_number_integer() || v.at("width").get<int64_t>() < 1)
      fail(path, "width must be a positive integer");
    m.variables.push_back({v.at("name").get<std::string>(),
                           static_cast<uint32_t>(v.at("width").get<int64_t>())});
  }
  if (!j.contains("functions") || !j.at("functions").is_object())
    throw ModelError("model needs a 'functions' object");
  for (const auto& [name, fj] : j.at("functions").items()) {
    const std::string path = "functions." + name;
    Function f;
    f.name = name;
    if (!fj.is_object() || !fj.contains("body")) fail(path, "function needs a 'body'");
    if (fj.contains("params")) {
      if (!fj.at("params").is_array()) fail(path, "'params' must be an array");
      for (const json& p : fj.at("params")) {
        if (!p.is_object() || !p.contains("name") || !p.contains("kind"))
          fail(path + ".params", "param needs 'name' and 'kind'");
        f.params.push_back({p.at("name").get<std::string>(),
                            kind_from_string(p.at("kind").get<std::string>(), path + ".params")});
      }
    }
    f.body = body_from_json(fj.at("body"), path + ".body");
    m.functions.push_back(std::move(f));
  }
  return m;
}

std::string to_json(const Model& m) {
  json j;
  j["entry"] = m.entry;
  json vars = json::array();
  for (const VarDecl& v : m.variables) vars.push_back({{"name", v.name}, {"width", v.width}});
  j["variables"] = vars;
  json fns = json::object();
  for (const Function& f : m.functions) {
    json fj;
    json params = json::array();
    for (const Param& p : f.params)
      params.push_back({{"name", p.name}, {"kind", kind_to_string(p.kind)}});
    fj["params"] = params;
    fj["body"] = body_to_json(f.body);
    fns[f.name] = fj;
  }
  j["functions"] = fns;
  return j.dump(2) + "\n";
}

const Function* find_function(const Model& m, const std::string& name) {
  for (const Function& f : m.functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

struct Validator {
  const Model& m;
  std::map<std::string, const Function*> fns;

  void check_body(const std::vector<Stmt>& body, const Function& f, std::set<std::string> scope,
                  std::set<std::string> indices, const std::string& path) {
    std::set<std::string> locals;  // allocated in this statement list
    for (size_t i = 0; i < body.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      std::visit(
          [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CallStmt>) {
              for (const Arg& a : s.args)
                for (const Operand& o : a) check_operand(o, scope, p);
              if (s.callee == "add_const") {
                if (s.args.size() != 1) fail(p, "add_const takes exactly one argument");
                if (!s.value) fail(p, "add_const needs a 'value'");
              } else {
                auto it = fns.find(s.callee);
                if (it == fns.end()) fail(p, "unknown function '" + s.callee + "'");
                if (s.value) fail(p, "'value' is only valid on add_const");
                if (it->second->params.size() != s.args.size())
                  fail(p, "call to '" + s.callee + "' expects " +
                              std::to_string(it->second->params.size()) + " args, got " +
                              std::to_string(s.args.size()));
              }
            } else if constexpr (std::is_same_v<T, GateStmt>) {
              size_t want = 0;
              bool needs_angle = false;
              if (s.gate == "H" || s.gate == "X") {
                want = 1;
              } else if (s.gate == "RZ") {
                want = 1;
                needs_angle = true;
              } else if (s.gate == "CX") {
                want = 2;
              } else if (s.gate == "CPhase") {
                want = 2;
                needs_angle = true;
              } else {
                fail(p, "unknown gate '" + s.gate + "'");
              }
              if (s.operands.size() != want)
                fail(p, s.gate + " expects " + std::to_string(want) + " operands");
              if (needs_angle && !s.has_angle) fail(p, s.gate + " needs an 'angle'");
              if (!needs_angle && s.has_angle) fail(p, s.gate + " takes no 'angle'");
              for (const Operand& o : s.operands) check_operand(o, scope, p);
            } else if constexpr (std::is_same_v<T, ControlStmt>) {
              check_operand(s.operand, scope, p);
              check_body(s.body, f, scope, indices, p + ".body");
            } else if constexpr (std::is_same_v<T, InvertStmt>) {
              check_body(s.body, f, scope, indices, p + ".invert");
            } else if constexpr (std::is_same_v<T, RepeatStmt>) {
              if (s.index.empty()) fail(p, "repeat needs a non-empty index name");
              if (indices.count(s.index)) fail(p, "repeat index '" + s.index + "' shadows");
              auto inner = indices;
              inner.insert(s.index);
              check_body(s.body, f, scope, inner, p + ".repeat.body");
            } else if constexpr (std::is_same_v<T, SelectStmt>) {
              if (s.alternatives.empty()) fail(p, "select needs at least one alternative");
              for (size_t k = 0; k < s.alternatives.size(); ++k)
                check_body(s.alternatives[k], f, scope, indices,
                           p + ".select[" + std::to_string(k) + "]");
            } else if constexpr (std::is_same_v<T, WithinStmt>) {
              check_body(s.within, f, scope, indices, p + ".within");
              check_body(s.apply, f, scope, indices, p + ".apply");
            } else if constexpr (std::is_same_v<T, AllocStmt>) {
              if (scope.count(s.name)) fail(p, "allocate shadows register '" + s.name + "'");
              scope.insert(s.name);
              locals.insert(s.name);
            } else if constexpr (std::is_same_v<T, FreeStmt>) {
              if (!locals.count(s.name))
                fail(p, "free of '" + s.name + "' which is not a live local of this block");
              scope.erase(s.name);
              locals.erase(s.name);
            }
          },
          static_cast<const StmtBase&>(body[i]));
    }
    if (!locals.empty())
      fail(path, "local '" + *locals.begin() + "' is allocated but never freed in its block");
  }

  static void check_operand(const Operand& o, const std::set<std::string>& scope,
                            const std::string& path) {
    if (!scope.count(o.var)) fail(path, "unknown register '" + o.var + "'");
  }

  void check_calls_acyclic() {
    std::map<std::string, int> state;  // 0 new, 1 active, 2 done
    for (const Function& f : m.functions) dfs(f, state);
  }

  void collect_callees(const std::vector<Stmt>& body, std::vector<std::string>& out) {
    for (const Stmt& st : body)
      std::visit(
          [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CallStmt>) {
              if (s.callee != "add_const") out.push_back(s.callee);
            } else if constexpr (std::is_same_v<T, ControlStmt> || std::is_same_v<T, InvertStmt> ||
                                 std::is_same_v<T, RepeatStmt>) {
              collect_callees(s.body, out);
            } else if constexpr (std::is_same_v<T, SelectStmt>) {
              for (const auto& alt : s.alternatives) collect_callees(alt, out);
            } else if constexpr (std::is_same_v<T, WithinStmt>) {
              collect_callees(s.within, out);
              collect_callees(s.apply, out);
            }
          },
          static_cast<const StmtBase&>(st));
  }

  void dfs(const Function& f, std::map<std::string, int>& state) {
    int& st = state[f.name];
    if (st == 2) return;
    if (st == 1) throw ModelError("recursive call cycle through '" + f.name + "'");
    st = 1;
    std::vector<std::string> callees;
    collect_callees(f.body, callees);
    for (const std::string& c : callees) {
      auto it = fns.find(c);
      if (it != fns.end()) dfs(*it->second, state);
    }
    st = 2;
  }
};

}  // namespace

void validate(const Model& m) {
  std::set<std::string> var_names;
  for (const VarDecl& v : m.variables) {
    if (v.name.empty()) throw ModelError("variable with empty name");
    if (!var_names.insert(v.name).second) throw ModelError("duplicate variable '" + v.name + "'");
  }
  Validator val{m, {}};
  for (const Function& f : m.functions) {
    if (f.name == "add_const") throw ModelError("'add_const' is reserved");
    if (!val.fns.emplace(f.name, &f).second)
      throw ModelError("duplicate function '" + f.name + "'");
  }
  const Function* entry = find_function(m, m.entry);
  if (!entry) throw ModelError("entry function '" + m.entry + "' not found");
  if (entry->params.size() != m.variables.size())
    throw ModelError("entry '" + m.entry + "' takes " + std::to_string(entry->params.size()) +
                     " params but the model declares " + std::to_string(m.variables.size()) +
                     " variables");
  for (size_t i = 0; i < entry->params.size(); ++i) {
    if (entry->params[i].kind == ParamKind::Qubit && m.variables[i].width != 1)
      throw ModelError("entry param '" + entry->params[i].name +
                       "' is a qubit but variable '" + m.variables[i].name + "' has width " +
                       std::to_string(m.variables[i].width));
  }
  val.check_calls_acyclic();
  for (const Function& f : m.functions) {
    std::set<std::string> scope;
    for (const Param& p : f.params) {
      if (!scope.insert(p.name).second)
        throw ModelError("functions." + f.name + ": duplicate param '" + p.name + "'");
    }
    val.check_body(f.body, f, scope, {}, "functions." + f.name + ".body");
  }
}

}  // namespace qsynth
