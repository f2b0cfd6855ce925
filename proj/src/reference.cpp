#include "qsynth/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qsynth {

namespace {

struct Frame {
  std::map<std::string, std::vector<uint32_t>> regs;
  ExprEnv env;  // vars = loop indices, lens kept in sync with regs

  void bind(const std::string& name, std::vector<uint32_t> qubits) {
    env.lens[name] = static_cast<int64_t>(qubits.size());
    regs[name] = std::move(qubits);
  }
  void unbind(const std::string& name) {
    regs.erase(name);
    env.lens.erase(name);
  }
};

struct Linearizer {
  const Model& m;
  ReferenceProgram out;
  std::vector<std::pair<uint32_t, bool>> controls;

  [[noreturn]] static void fail(const std::string& what) { throw ReferenceError(what); }

  std::vector<uint32_t> resolve(const Operand& o, const Frame& f) const {
    auto it = f.regs.find(o.var);
    if (it == f.regs.end()) fail("unknown register '" + o.var + "'");
    const std::vector<uint32_t>& reg = it->second;
    const int64_t w = static_cast<int64_t>(reg.size());
    if (o.index) {
      const int64_t i = eval_expr(*o.index, f.env);
      if (i < 0 || i >= w)
        fail("index " + std::to_string(i) + " out of range for '" + o.var + "' of width " +
             std::to_string(w));
      return {reg[static_cast<size_t>(i)]};
    }
    if (o.lo) {
      const int64_t lo = eval_expr(*o.lo, f.env);
      const int64_t hi = eval_expr(*o.hi, f.env);
      if (lo < 0 || hi > w || hi <= lo)
        fail("slice [" + std::to_string(lo) + ":" + std::to_string(hi) + "] invalid for '" +
             o.var + "' of width " + std::to_string(w));
      return std::vector<uint32_t>(reg.begin() + lo, reg.begin() + hi);
    }
    return reg;
  }

  std::vector<uint32_t> resolve_arg(const Arg& a, const Frame& f) const {
    std::vector<uint32_t> qs;
    for (const Operand& o : a) {
      const auto part = resolve(o, f);
      qs.insert(qs.end(), part.begin(), part.end());
    }
    return qs;
  }

  uint32_t single(const Operand& o, const Frame& f, const std::string& gate) const {
    const auto qs = resolve(o, f);
    if (qs.size() != 1) fail(gate + " operand '" + o.text() + "' must be a single qubit");
    return qs[0];
  }

  void emit(PrimOp op) {
    std::map<uint32_t, bool> need;
    for (const auto& [q, b] : controls) {
      const auto [it, inserted] = need.emplace(q, b);
      if (!inserted && it->second != b) return;  // contradictory, never fires
    }
    for (uint32_t q : op.qubits)
      if (need.count(q)) fail("operation acts on one of its own control qubits");
    auto uniq = op.qubits;
    std::sort(uniq.begin(), uniq.end());
    if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end())
      fail("operation operand repeats a qubit");
    op.controls = controls;
    out.ops.push_back(std::move(op));
  }

  // Width of every local allocated directly in this statement list, needed
  // to re-create it when the list is walked in reverse.
  std::map<std::string, const AllocStmt*> local_allocs(const std::vector<Stmt>& body) const {
    std::map<std::string, const AllocStmt*> widths;
    for (const Stmt& st : body)
      if (const auto* a = std::get_if<AllocStmt>(&st)) widths[a->name] = a;
    return widths;
  }

  void walk_body(const std::vector<Stmt>& body, Frame& f, bool inv) {
    const auto allocs = local_allocs(body);
    if (!inv) {
      for (const Stmt& st : body) walk(st, f, inv, allocs);
    } else {
      for (auto it = body.rbegin(); it != body.rend(); ++it) walk(*it, f, inv, allocs);
    }
  }

  void walk(const Stmt& st, Frame& f, bool inv,
            const std::map<std::string, const AllocStmt*>& allocs) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, GateStmt>) {
            walk_gate(s, f, inv);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            walk_call(s, f, inv);
          } else if constexpr (std::is_same_v<T, ControlStmt>) {
            const auto qs = resolve(s.operand, f);
            const int64_t v = eval_expr(s.equals, f.env);
            if (v < 0 || (qs.size() < 63 && v >= (int64_t{1} << qs.size())))
              fail("control value " + std::to_string(v) + " out of range for width " +
                   std::to_string(qs.size()));
            const size_t base = controls.size();
            for (size_t i = 0; i < qs.size(); ++i)
              controls.emplace_back(qs[i], ((v >> i) & 1) != 0);
            walk_body(s.body, f, inv);
            controls.resize(base);
          } else if constexpr (std::is_same_v<T, InvertStmt>) {
            walk_body(s.body, f, !inv);
          } else if constexpr (std::is_same_v<T, RepeatStmt>) {
            const int64_t n = eval_expr(s.count, f.env);
            if (n < 0) fail("repeat count " + std::to_string(n) + " is negative");
            for (int64_t k = 0; k < n; ++k) {
              const int64_t i = inv ? n - 1 - k : k;
              f.env.vars[s.index] = i;
              walk_body(s.body, f, inv);
            }
            f.env.vars.erase(s.index);
          } else if constexpr (std::is_same_v<T, SelectStmt>) {
            walk_body(s.alternatives.front(), f, inv);
          } else if constexpr (std::is_same_v<T, WithinStmt>) {
            walk_body(s.within, f, false);
            walk_body(s.apply, f, inv);
            walk_body(s.within, f, true);
          } else if constexpr (std::is_same_v<T, AllocStmt>) {
            if (!inv) {
              const int64_t w = eval_expr(s.width, f.env);
              if (w < 1) fail("allocate width " + std::to_string(w) + " must be positive");
              std::vector<uint32_t> qs(static_cast<size_t>(w));
              for (auto& q : qs) q = out.total_qubits++;
              f.bind(s.name, std::move(qs));
            } else {
              f.unbind(s.name);  // reverse walk: allocation closes the local
            }
          } else if constexpr (std::is_same_v<T, FreeStmt>) {
            if (!inv) {
              f.unbind(s.name);
            } else {
              auto it = allocs.find(s.name);
              if (it == allocs.end()) fail("inverted free of unknown local '" + s.name + "'");
              const int64_t w = eval_expr(it->second->width, f.env);
              std::vector<uint32_t> qs(static_cast<size_t>(w));
              for (auto& q : qs) q = out.total_qubits++;
              f.bind(s.name, std::move(qs));
            }
          }
        },
        static_cast<const StmtBase&>(st));
  }

  void walk_gate(const GateStmt& s, Frame& f, bool inv) {
    PrimOp op;
    if (s.gate == "H") {
      op.kind = PrimOp::Kind::H;
      op.qubits = {single(s.operands[0], f, s.gate)};
    } else if (s.gate == "X") {
      op.kind = PrimOp::Kind::X;
      op.qubits = {single(s.operands[0], f, s.gate)};
    } else if (s.gate == "RZ") {
      op.kind = PrimOp::Kind::RZ;
      op.qubits = {single(s.operands[0], f, s.gate)};
      op.angle = inv ? -s.angle : s.angle;
    } else if (s.gate == "CX") {
      op.kind = PrimOp::Kind::CX;
      op.qubits = {single(s.operands[0], f, s.gate), single(s.operands[1], f, s.gate)};
      if (op.qubits[0] == op.qubits[1]) fail("CX control equals target");
    } else if (s.gate == "CPhase") {
      op.kind = PrimOp::Kind::CPhase;
      op.qubits = {single(s.operands[0], f, s.gate), single(s.operands[1], f, s.gate)};
      if (op.qubits[0] == op.qubits[1]) fail("CPhase operands coincide");
      op.angle = inv ? -s.angle : s.angle;
    } else {
      fail("unknown gate '" + s.gate + "'");
    }
    emit(std::move(op));
  }

  void walk_call(const CallStmt& s, Frame& f, bool inv) {
    if (s.callee == "add_const") {
      const auto qs = resolve_arg(s.args[0], f);
      if (qs.empty()) fail("add_const needs a non-empty register");
      if (qs.size() > 62) fail("add_const register too wide");
      PrimOp op;
      op.kind = PrimOp::Kind::AddConst;
      op.qubits = qs;
      const uint64_t mask = (uint64_t{1} << qs.size()) - 1;
      const int64_t v = eval_expr(*s.value, f.env);
      const uint64_t c = static_cast<uint64_t>(v) & mask;
      op.constant = inv ? ((mask + 1 - c) & mask) : c;
      emit(std::move(op));
      return;
    }
    const Function* callee = find_function(m, s.callee);
    if (!callee) fail("unknown function '" + s.callee + "'");
    Frame inner;
    for (size_t i = 0; i < callee->params.size(); ++i) {
      auto qs = resolve_arg(s.args[i], f);
      if (callee->params[i].kind == ParamKind::Qubit && qs.size() != 1)
        fail("param '" + callee->params[i].name + "' of '" + callee->name +
             "' expects a single qubit, got width " + std::to_string(qs.size()));
      inner.bind(callee->params[i].name, std::move(qs));
    }
    walk_body(callee->body, inner, inv);
  }
};

}  // namespace

ReferenceProgram linearize(const Model& m) {
  validate(m);
  Linearizer lin{m, {}, {}};
  const Function* entry = find_function(m, m.entry);
  Frame f;
  for (size_t i = 0; i < m.variables.size(); ++i) {
    std::vector<uint32_t> qs(m.variables[i].width);
    for (auto& q : qs) q = lin.out.total_qubits++;
    lin.out.entry_qubits.insert(lin.out.entry_qubits.end(), qs.begin(), qs.end());
    f.bind(entry->params[i].name, std::move(qs));
  }
  lin.walk_body(entry->body, f, false);
  return std::move(lin.out);
}

void apply(StateVector& sv, const PrimOp& op) {
  uint64_t cmask = 0, cval = 0;
  for (const auto& [q, b] : op.controls) {
    cmask |= uint64_t{1} << q;
    if (b) cval |= uint64_t{1} << q;
  }
  const uint64_t dim = sv.dim();
  auto fires = [&](uint64_t idx) { return (idx & cmask) == cval; };
  switch (op.kind) {
    case PrimOp::Kind::H: {
      const uint64_t bit = uint64_t{1} << op.qubits[0];
      const double s = 1.0 / std::sqrt(2.0);
      for (uint64_t i = 0; i < dim; ++i) {
        if ((i & bit) || !fires(i)) continue;
        const cplx a0 = sv.amp[i], a1 = sv.amp[i | bit];
        sv.amp[i] = s * (a0 + a1);
        sv.amp[i | bit] = s * (a0 - a1);
      }
      break;
    }
    case PrimOp::Kind::X: {
      const uint64_t bit = uint64_t{1} << op.qubits[0];
      for (uint64_t i = 0; i < dim; ++i)
        if (!(i & bit) && fires(i)) std::swap(sv.amp[i], sv.amp[i | bit]);
      break;
    }
    case PrimOp::Kind::RZ: {
      const uint64_t bit = uint64_t{1} << op.qubits[0];
      const cplx p0 = std::exp(cplx(0, -op.angle / 2)), p1 = std::exp(cplx(0, op.angle / 2));
      for (uint64_t i = 0; i < dim; ++i)
        if (fires(i)) sv.amp[i] *= (i & bit) ? p1 : p0;
      break;
    }
    case PrimOp::Kind::CX: {
      const uint64_t cbit = uint64_t{1} << op.qubits[0];
      const uint64_t tbit = uint64_t{1} << op.qubits[1];
      for (uint64_t i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & tbit) && fires(i)) std::swap(sv.amp[i], sv.amp[i | tbit]);
      break;
    }
    case PrimOp::Kind::CPhase: {
      const uint64_t m01 = (uint64_t{1} << op.qubits[0]) | (uint64_t{1} << op.qubits[1]);
      const cplx p = std::exp(cplx(0, op.angle));
      for (uint64_t i = 0; i < dim; ++i)
        if (((i & m01) == m01) && fires(i)) sv.amp[i] *= p;
      break;
    }
    case PrimOp::Kind::AddConst: {
      std::vector<cplx> next(dim, cplx(0, 0));
      const uint64_t w = op.qubits.size();
      const uint64_t wmask = (uint64_t{1} << w) - 1;
      for (uint64_t i = 0; i < dim; ++i) {
        if (!fires(i)) {
          next[i] += sv.amp[i];
          continue;
        }
        uint64_t x = 0;
        for (uint64_t k = 0; k < w; ++k)
          if (i & (uint64_t{1} << op.qubits[k])) x |= uint64_t{1} << k;
        const uint64_t y = (x + op.constant) & wmask;
        uint64_t j = i;
        for (uint64_t k = 0; k < w; ++k) {
          const uint64_t bit = uint64_t{1} << op.qubits[k];
          if (y & (uint64_t{1} << k))
            j |= bit;
          else
            j &= ~bit;
        }
        next[j] += sv.amp[i];
      }
      sv.amp = std::move(next);
      break;
    }
  }
}

void apply(StateVector& sv, const ReferenceProgram& p) {
  if (sv.num_qubits < p.total_qubits)
    throw ReferenceError("state has fewer qubits than the program uses");
  for (const PrimOp& op : p.ops) apply(sv, op);
}

FunctionalBlock reference_block(const Model& m) {
  const ReferenceProgram p = linearize(m);
  if (p.total_qubits > kMaxStateQubits)
    throw ReferenceError("program needs " + std::to_string(p.total_qubits) +
                         " qubits, over the simulation cap");
  if (p.entry_qubits.size() > kMaxUnitaryQubits)
    throw ReferenceError("entry space too large to build densely");
  const uint64_t fdim = uint64_t{1} << p.entry_qubits.size();
  FunctionalBlock fb{Matrix(fdim), 0.0};
  const uint32_t total = std::max<uint32_t>(p.total_qubits, 1);
  for (uint64_t col = 0; col < fdim; ++col) {
    uint64_t idx = 0;
    for (size_t k = 0; k < p.entry_qubits.size(); ++k)
      if (col & (uint64_t{1} << k)) idx |= uint64_t{1} << p.entry_qubits[k];
    StateVector sv = StateVector::basis(total, idx);
    apply(sv, p);
    for (uint64_t i = 0; i < sv.dim(); ++i) {
      const cplx a = sv.amp[i];
      if (a == cplx(0, 0)) continue;
      uint64_t row = 0;
      uint64_t rest = i;
      for (size_t k = 0; k < p.entry_qubits.size(); ++k) {
        const uint64_t bit = uint64_t{1} << p.entry_qubits[k];
        if (i & bit) row |= uint64_t{1} << k;
        rest &= ~bit;
      }
      if (rest != 0)
        fb.leak = std::max(fb.leak, std::abs(a));
      else
        fb.op.at(row, col) = a;
    }
  }
  return fb;
}

}  // namespace qsynth
