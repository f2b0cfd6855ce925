#include "qsynth/callgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "qsynth/expr.hpp"

namespace qsynth {

namespace {

struct Frame {
  std::map<std::string, std::vector<WireId>> regs;
  ExprEnv env;

  void bind(const std::string& name, std::vector<WireId> qubits) {
    env.lens[name] = static_cast<int64_t>(qubits.size());
    regs[name] = std::move(qubits);
  }
  void unbind(const std::string& name) {
    regs.erase(name);
    env.lens.erase(name);
  }
};

// Lowers one statement list into a node vector. Fragment builders share the
// graph-wide wire counter so spliced nodes never need wire remapping.
struct Builder {
  const Model& m;
  uint32_t& wires;
  std::vector<Node>& nodes;
  std::map<WireId, uint32_t> frontier;  // wire -> last local node touching it
  std::vector<WireId> controls;         // active all-ones control wires
  std::set<WireId> flipped;             // wires inside an open X conjugation

  [[noreturn]] static void fail(const std::string& what) { throw LoweringError(what); }

  std::vector<WireId> resolve(const Operand& o, const Frame& f) const {
    auto it = f.regs.find(o.var);
    if (it == f.regs.end()) fail("unknown register '" + o.var + "'");
    const std::vector<WireId>& reg = it->second;
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
      return std::vector<WireId>(reg.begin() + lo, reg.begin() + hi);
    }
    return reg;
  }

  std::vector<WireId> resolve_arg(const Arg& a, const Frame& f) const {
    std::vector<WireId> qs;
    for (const Operand& o : a) {
      const auto part = resolve(o, f);
      qs.insert(qs.end(), part.begin(), part.end());
    }
    return qs;
  }

  WireId single(const Operand& o, const Frame& f, const std::string& gate) const {
    const auto qs = resolve(o, f);
    if (qs.size() != 1) fail(gate + " operand '" + o.text() + "' must be a single qubit");
    return qs[0];
  }

  uint32_t push_node(Node n) {
    const uint32_t id = static_cast<uint32_t>(nodes.size());
    std::set<uint32_t> ps;
    for (WireId w : n.wires) {
      auto it = frontier.find(w);
      if (it != frontier.end()) ps.insert(it->second);
    }
    for (uint32_t p : ps) {
      n.preds.push_back(p);
      nodes[p].succs.push_back(id);
    }
    for (WireId w : n.wires) frontier[w] = id;
    nodes.push_back(std::move(n));
    return id;
  }

  void push_call(LibFn fn, const std::vector<WireId>& targets) {
    Node n;
    n.kind = NodeKind::Elementary;
    n.fn = fn;
    n.wires = controls;
    n.wires.insert(n.wires.end(), targets.begin(), targets.end());
    auto uniq = n.wires;
    std::sort(uniq.begin(), uniq.end());
    if (std::adjacent_find(uniq.begin(), uniq.end()) != uniq.end())
      fail(fn.name() + " operand repeats a wire");
    push_node(std::move(n));
  }

  void push_x(WireId q) {
    Node n;
    n.kind = NodeKind::Elementary;
    n.fn = mcx_fn(0);
    n.wires = {q};
    push_node(std::move(n));
  }

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
            walk_control(s, f, inv);
          } else if constexpr (std::is_same_v<T, InvertStmt>) {
            walk_body(s.body, f, !inv);
          } else if constexpr (std::is_same_v<T, RepeatStmt>) {
            const int64_t n = eval_expr(s.count, f.env);
            if (n < 0) fail("repeat count " + std::to_string(n) + " is negative");
            for (int64_t k = 0; k < n; ++k) {
              f.env.vars[s.index] = inv ? n - 1 - k : k;
              walk_body(s.body, f, inv);
            }
            f.env.vars.erase(s.index);
          } else if constexpr (std::is_same_v<T, SelectStmt>) {
            walk_select(s, f, inv);
          } else if constexpr (std::is_same_v<T, WithinStmt>) {
            // A conjugation W A Winv needs controls only on the apply part.
            const auto saved = controls;
            controls.clear();
            walk_body(s.within, f, false);
            controls = saved;
            walk_body(s.apply, f, inv);
            controls.clear();
            walk_body(s.within, f, true);
            controls = saved;
          } else if constexpr (std::is_same_v<T, AllocStmt>) {
            if (!inv) {
              const int64_t w = eval_expr(s.width, f.env);
              if (w < 1) fail("allocate width " + std::to_string(w) + " must be positive");
              make_alloc(s.name, static_cast<uint32_t>(w), f);
            } else {
              make_free(s.name, f);
            }
          } else if constexpr (std::is_same_v<T, FreeStmt>) {
            if (!inv) {
              make_free(s.name, f);
            } else {
              auto it = allocs.find(s.name);
              if (it == allocs.end()) fail("inverted free of unknown local '" + s.name + "'");
              const int64_t w = eval_expr(it->second->width, f.env);
              make_alloc(s.name, static_cast<uint32_t>(w), f);
            }
          }
        },
        static_cast<const StmtBase&>(st));
  }

  void make_alloc(const std::string& name, uint32_t width, Frame& f) {
    Node n;
    n.kind = NodeKind::Alloc;
    std::vector<WireId> qs(width);
    for (auto& q : qs) q = wires++;
    n.wires = qs;
    push_node(std::move(n));
    f.bind(name, std::move(qs));
  }

  void make_free(const std::string& name, Frame& f) {
    auto it = f.regs.find(name);
    if (it == f.regs.end()) fail("free of unknown local '" + name + "'");
    Node n;
    n.kind = NodeKind::Free;
    n.wires = it->second;
    push_node(std::move(n));
    f.unbind(name);
  }

  void walk_control(const ControlStmt& s, Frame& f, bool inv) {
    const auto qs = resolve(s.operand, f);
    const int64_t v = eval_expr(s.equals, f.env);
    if (v < 0 || (qs.size() < 63 && v >= (int64_t{1} << qs.size())))
      fail("control value " + std::to_string(v) + " out of range for width " +
           std::to_string(qs.size()));
    // Required wire value after accounting for open conjugations. A zero
    // requirement on an active all-ones control wire can never fire.
    std::vector<WireId> conj, extend;
    for (size_t i = 0; i < qs.size(); ++i) {
      const WireId q = qs[i];
      const bool want = ((v >> i) & 1) != 0;
      const bool eff = want != (flipped.count(q) != 0);
      const bool active = std::find(controls.begin(), controls.end(), q) != controls.end();
      if (!eff && active) return;  // contradictory, body is dead
      if (!eff) {
        conj.push_back(q);
        extend.push_back(q);
      } else if (!active) {
        extend.push_back(q);
      }
    }
    for (WireId q : conj) {
      push_x(q);
      flipped.insert(q);
    }
    controls.insert(controls.end(), extend.begin(), extend.end());
    walk_body(s.body, f, inv);
    controls.resize(controls.size() - extend.size());
    for (auto it = conj.rbegin(); it != conj.rend(); ++it) {
      push_x(*it);
      flipped.erase(*it);
    }
  }

  void walk_select(const SelectStmt& s, Frame& f, bool inv) {
    Node comp;
    comp.kind = NodeKind::Composite;
    const WireId floor = wires;
    for (const auto& alt : s.alternatives) {
      Fragment fr;
      Builder sub{m, wires, fr.nodes, {}, controls, flipped};
      Frame copy = f;
      sub.walk_body(alt, copy, inv);
      comp.alternatives.push_back(std::move(fr));
    }
    std::set<WireId> boundary;
    for (const Fragment& fr : comp.alternatives)
      for (const Node& n : fr.nodes)
        for (WireId w : n.wires)
          if (w < floor) boundary.insert(w);
    comp.wires.assign(boundary.begin(), boundary.end());
    push_node(std::move(comp));
  }

  void walk_gate(const GateStmt& s, Frame& f, bool inv) {
    const uint32_t nc = static_cast<uint32_t>(controls.size());
    if (s.gate == "H") {
      push_call(mch_fn(nc), {single(s.operands[0], f, s.gate)});
    } else if (s.gate == "X") {
      push_call(mcx_fn(nc), {single(s.operands[0], f, s.gate)});
    } else if (s.gate == "RZ") {
      push_call(mcrz_fn(inv ? -s.angle : s.angle, nc), {single(s.operands[0], f, s.gate)});
    } else if (s.gate == "CX") {
      const WireId a = single(s.operands[0], f, s.gate);
      const WireId b = single(s.operands[1], f, s.gate);
      if (a == b) fail("CX control equals target");
      push_call(mcx_fn(nc + 1), {a, b});
    } else if (s.gate == "CPhase") {
      const WireId a = single(s.operands[0], f, s.gate);
      const WireId b = single(s.operands[1], f, s.gate);
      if (a == b) fail("CPhase operands coincide");
      push_call(mcp_fn(inv ? -s.angle : s.angle, nc + 1), {a, b});
    } else {
      fail("unknown gate '" + s.gate + "'");
    }
  }

  void walk_call(const CallStmt& s, Frame& f, bool inv) {
    if (s.callee == "add_const") {
      const auto qs = resolve_arg(s.args[0], f);
      if (qs.empty()) fail("add_const needs a non-empty register");
      if (qs.size() > 62) fail("add_const register too wide");
      const int64_t v = eval_expr(*s.value, f.env);
      push_call(add_const_fn(static_cast<uint32_t>(qs.size()), inv ? -v : v,
                             static_cast<uint32_t>(controls.size())),
                qs);
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

void add_order_edge(Graph& g, NodeId a, NodeId b) {
  auto& succs = g.nodes[a].order_succs;
  if (std::find(succs.begin(), succs.end(), b) != succs.end()) return;
  succs.push_back(b);
  g.nodes[b].order_preds.push_back(a);
}

std::vector<NodeId> merged_sorted(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::vector<NodeId> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Graph lower(const Model& m) {
  validate(m);
  Graph g;
  Builder b{m, g.num_wires, g.nodes, {}, {}, {}};
  const Function* entry = find_function(m, m.entry);
  Frame f;
  for (size_t i = 0; i < m.variables.size(); ++i) {
    std::vector<WireId> qs(m.variables[i].width);
    for (auto& q : qs) q = g.num_wires++;
    f.bind(entry->params[i].name, std::move(qs));
  }
  g.num_entry_wires = g.num_wires;
  b.walk_body(entry->body, f, false);
  return g;
}

void reduce(Graph& g) {
  using Key = std::tuple<LibFn, std::vector<NodeId>, std::vector<NodeId>>;
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<Key, std::vector<NodeId>> groups;
    for (NodeId id = 0; id < g.nodes.size(); ++id) {
      const Node& n = g.nodes[id];
      if (n.kind != NodeKind::Elementary) continue;
      groups[{n.fn, merged_sorted(n.preds, n.order_preds), merged_sorted(n.succs, n.order_succs)}]
          .push_back(id);
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto& [key, ids] : groups) {
      if (ids.size() < 2) continue;
      std::sort(ids.begin(), ids.end());
      for (size_t i = 0; i + 1 < ids.size(); ++i) edges.emplace_back(ids[i], ids[i + 1]);
    }
    for (const auto& [a, b] : edges) {
      const auto& succs = g.nodes[a].order_succs;
      if (std::find(succs.begin(), succs.end(), b) == succs.end()) {
        add_order_edge(g, a, b);
        changed = true;
      }
    }
  }
}

std::vector<NodeId> ready_nodes(const Graph& g, const std::vector<bool>& placed) {
  std::vector<NodeId> out;
  for (NodeId id = 0; id < g.nodes.size(); ++id) {
    if (placed[id]) continue;
    const Node& n = g.nodes[id];
    bool ready = true;
    for (NodeId p : n.preds)
      if (!placed[p]) ready = false;
    for (NodeId p : n.order_preds)
      if (!placed[p]) ready = false;
    if (ready) out.push_back(id);
  }
  return out;
}

std::string to_dot(const Graph& g) {
  std::ostringstream os;
  os << "digraph callgraph {\n  rankdir=LR;\n";
  for (NodeId id = 0; id < g.nodes.size(); ++id) {
    const Node& n = g.nodes[id];
    std::string label, shape = "box";
    switch (n.kind) {
      case NodeKind::Elementary:
        label = n.fn.name();
        break;
      case NodeKind::Alloc:
        label = "alloc" + std::to_string(n.wires.size());
        shape = "ellipse";
        break;
      case NodeKind::Free:
        label = "free" + std::to_string(n.wires.size());
        shape = "ellipse";
        break;
      case NodeKind::Composite:
        label = "select" + std::to_string(n.alternatives.size());
        shape = "box3d";
        break;
      case NodeKind::Barrier:
        label = "barrier";
        shape = "point";
        break;
    }
    os << "  n" << id << " [label=\"" << id << ":" << label << " [";
    for (size_t k = 0; k < n.wires.size(); ++k) os << (k ? "," : "") << n.wires[k];
    os << "]\" shape=" << shape << "];\n";
  }
  for (NodeId id = 0; id < g.nodes.size(); ++id) {
    for (NodeId s : g.nodes[id].succs) os << "  n" << id << " -> n" << s << ";\n";
    for (NodeId s : g.nodes[id].order_succs)
      os << "  n" << id << " -> n" << s << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

Expansion expand(Graph& g, NodeId composite, size_t alternative) {
  Node& c = g.nodes[composite];
  if (c.kind != NodeKind::Composite) throw LoweringError("expand target is not a composite");
  if (alternative >= c.alternatives.size()) throw LoweringError("alternative out of range");
  Expansion e;
  e.composite = composite;
  e.first_new_node = static_cast<uint32_t>(g.nodes.size());
  e.moved_succs = c.succs;
  const Fragment frag = c.alternatives[alternative];  // copy: splicing reallocates nodes
  const uint32_t offset = e.first_new_node;
  const NodeId end = offset + static_cast<uint32_t>(frag.nodes.size());
  e.end_barrier = end;

  std::vector<NodeId> roots;
  for (size_t i = 0; i < frag.nodes.size(); ++i) {
    Node n = frag.nodes[i];
    for (NodeId& p : n.preds) p += offset;
    for (NodeId& s : n.succs) s += offset;
    if (n.preds.empty()) {
      n.preds.push_back(composite);
      roots.push_back(offset + static_cast<uint32_t>(i));
    }
    if (n.succs.empty()) n.succs.push_back(end);
    g.nodes.push_back(std::move(n));
  }

  Node barrier;
  barrier.kind = NodeKind::Barrier;
  for (uint32_t i = offset; i < end; ++i)
    if (!g.nodes[i].succs.empty() && g.nodes[i].succs.back() == end) barrier.preds.push_back(i);
  barrier.preds.push_back(composite);
  barrier.succs = e.moved_succs;
  g.nodes.push_back(std::move(barrier));

  Node& c2 = g.nodes[composite];  // re-fetch: pushes may reallocate
  c2.kind = NodeKind::Barrier;
  c2.succs = roots;
  c2.succs.push_back(end);
  for (NodeId s : e.moved_succs)
    for (NodeId& p : g.nodes[s].preds)
      if (p == composite) p = end;
  return e;
}

void undo_expand(Graph& g, const Expansion& e) {
  g.nodes.resize(e.first_new_node);
  Node& c = g.nodes[e.composite];
  c.kind = NodeKind::Composite;
  c.succs = e.moved_succs;
  for (NodeId s : e.moved_succs)
    for (NodeId& p : g.nodes[s].preds)
      if (p == e.end_barrier) p = e.composite;
}

}  // namespace qsynth
