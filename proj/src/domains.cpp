#include "qsynth/domains.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <tuple>

#include "qsynth/stdlib.hpp"

namespace qsynth {

namespace {

uint64_t objective_coord(const ResourceTuple& t, Objective obj) {
  switch (obj) {
    case Objective::Width:
      return t.aux;
    case Objective::Depth:
      return t.depth;
    case Objective::Cx:
      return t.counts.cx;
    case Objective::None:
      break;
  }
  return 0;
}

bool dominates(const ResourceTuple& a, const ResourceTuple& b) {
  if (a.aux > b.aux || a.depth > b.depth || a.counts.cx > b.counts.cx ||
      a.counts.single > b.counts.single)
    return false;
  if (a.aux < b.aux || a.depth < b.depth || a.counts.cx < b.counts.cx ||
      a.counts.single < b.counts.single)
    return true;
  return a.variant < b.variant;  // identical profiles: keep the earliest
}

uint32_t node_width(const Node& n) { return static_cast<uint32_t>(n.wires.size()); }

}  // namespace

bool tuple_less(const ResourceTuple& a, const ResourceTuple& b, Objective obj) {
  const auto key = [obj](const ResourceTuple& t) {
    return std::tuple(objective_coord(t, obj), t.aux, t.counts.cx, t.depth, t.variant);
  };
  return key(a) < key(b);
}

void DomainJournal::undo_to(size_t mark, std::vector<Domain>& domains) {
  while (records.size() > mark) {
    const Record& r = records.back();
    Domain& d = domains[r.node];
    d.insert(d.begin() + r.index, r.tuple);
    records.pop_back();
  }
}

void remove_tuple(std::vector<Domain>& domains, DomainJournal& journal, NodeId node,
                  uint32_t index) {
  Domain& d = domains[node];
  journal.records.push_back({node, index, d[index]});
  d.erase(d.begin() + index);
}

Domain node_menu(const Node& n, const Constraints& cons, Objective obj, uint32_t entry_wires) {
  Domain d;
  if (n.kind == NodeKind::Elementary) {
    const auto& vs = variants_of(n.fn);
    for (uint32_t v = 0; v < vs.size(); ++v) {
      const ResourceProfile& p = resource_profile(n.fn, v);
      d.push_back({v, p.aux, p.depth, p.counts});
    }
  } else {
    ResourceTuple t;
    if (n.kind == NodeKind::Alloc) t.aux = node_width(n);
    d.push_back(t);
  }
  // Entry qubits stay live for the whole program, so aux beyond the gap to
  // the width budget can never fit; the other caps are direct.
  std::erase_if(d, [&](const ResourceTuple& t) {
    if (cons.max_width &&
        int64_t{t.aux} > int64_t{*cons.max_width} - int64_t{entry_wires})
      return true;
    if (cons.max_depth && t.depth > *cons.max_depth) return true;
    if (cons.max_cx && t.counts.cx > *cons.max_cx) return true;
    if (cons.max_single && t.counts.single > *cons.max_single) return true;
    return false;
  });
  Domain kept;
  for (const ResourceTuple& t : d) {
    bool dead = false;
    for (const ResourceTuple& s : d)
      if (!(s == t) && dominates(s, t)) dead = true;
    if (!dead) kept.push_back(t);
  }
  std::sort(kept.begin(), kept.end(),
            [obj](const ResourceTuple& a, const ResourceTuple& b) {
              return tuple_less(a, b, obj);
            });
  if (!cons.any() && kept.size() > 1) kept.resize(1);
  return kept;
}

std::vector<Domain> initialize_domains(const Graph& g, const Constraints& cons, Objective obj) {
  std::vector<Domain> domains(g.nodes.size());
  for (NodeId id = 0; id < g.nodes.size(); ++id)
    domains[id] = node_menu(g.nodes[id], cons, obj, g.num_entry_wires);
  return domains;
}

std::vector<NodeId> topological_order(const Graph& g) {
  const size_t n = g.nodes.size();
  std::vector<uint32_t> indeg(n, 0);
  for (NodeId id = 0; id < n; ++id)
    indeg[id] = static_cast<uint32_t>(g.nodes[id].preds.size() + g.nodes[id].order_preds.size());
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<NodeId>> ready;
  for (NodeId id = 0; id < n; ++id)
    if (indeg[id] == 0) ready.push(id);
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    const auto relax = [&](NodeId s) {
      if (--indeg[s] == 0) ready.push(s);
    };
    for (NodeId s : g.nodes[id].succs) relax(s);
    for (NodeId s : g.nodes[id].order_succs) relax(s);
  }
  if (order.size() != n) throw LoweringError("dependency graph has a cycle");
  return order;
}

namespace {

struct Reach {
  size_t words = 0;
  std::vector<uint64_t> bits;  // descendant sets, one row per node

  Reach(const Graph& g, const std::vector<NodeId>& topo) {
    const size_t n = g.nodes.size();
    words = (n + 63) / 64;
    bits.assign(n * words, 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const NodeId id = *it;
      uint64_t* row = &bits[id * words];
      const auto absorb = [&](NodeId s) {
        row[s / 64] |= uint64_t{1} << (s % 64);
        const uint64_t* srow = &bits[s * words];
        for (size_t w = 0; w < words; ++w) row[w] |= srow[w];
      };
      for (NodeId s : g.nodes[id].succs) absorb(s);
      for (NodeId s : g.nodes[id].order_succs) absorb(s);
    }
  }

  bool reaches(NodeId from, NodeId to) const {
    return (bits[from * words + to / 64] >> (to % 64)) & 1;
  }
};

}  // namespace

bool propagate(const PropagationInput& in, std::vector<Domain>& domains, DomainJournal& journal) {
  const Graph& g = in.graph;
  const size_t n = g.nodes.size();
  const auto trace = [&](const std::string& line) {
    if (in.trace) *in.trace << "[propagate] " << line << "\n";
  };

  for (NodeId id = 0; id < n; ++id)
    if (!in.states[id].placed && domains[id].empty()) {
      trace("inconsistent: node " + std::to_string(id) + " has an empty domain");
      return false;
    }

  const auto min_depth = [&](NodeId id) {
    uint64_t m = UINT64_MAX;
    for (const ResourceTuple& t : domains[id]) m = std::min(m, t.depth);
    return m;
  };

  bool changed = true;
  while (changed) {
    changed = false;

    if (in.cons.max_cx && in.committed_cx > *in.cons.max_cx) {
      trace("inconsistent: committed cx " + std::to_string(in.committed_cx) + " over budget");
      return false;
    }
    if (in.cons.max_single && in.committed_single > *in.cons.max_single) {
      trace("inconsistent: committed single-qubit count over budget");
      return false;
    }
    if (in.cons.max_width && in.width_used > *in.cons.max_width) {
      trace("inconsistent: committed width " + std::to_string(in.width_used) + " over budget");
      return false;
    }

    // Count passes: every unplaced node must still fit after all other nodes
    // take their cheapest tuple.
    const auto counts_pass = [&](uint64_t limit, uint64_t committed, auto proj,
                                 const char* label) -> int {
      uint64_t base = committed;
      for (NodeId id = 0; id < n; ++id) {
        if (in.states[id].placed) continue;
        uint64_t m = UINT64_MAX;
        for (const ResourceTuple& t : domains[id]) m = std::min(m, proj(t));
        base += m;
      }
      if (base > limit) {
        trace(std::string("inconsistent: minimal total ") + label + " " + std::to_string(base) +
              " exceeds " + std::to_string(limit));
        return -1;
      }
      int any = 0;
      for (NodeId id = 0; id < n; ++id) {
        if (in.states[id].placed) continue;
        uint64_t m = UINT64_MAX;
        for (const ResourceTuple& t : domains[id]) m = std::min(m, proj(t));
        const uint64_t slack = limit - (base - m);
        for (uint32_t i = static_cast<uint32_t>(domains[id].size()); i-- > 0;) {
          if (proj(domains[id][i]) > slack) {
            trace(std::string(label) + ": node " + std::to_string(id) + " drops variant " +
                  std::to_string(domains[id][i].variant) + " (" +
                  std::to_string(proj(domains[id][i])) + " > slack " + std::to_string(slack) +
                  ")");
            remove_tuple(domains, journal, id, i);
            any = 1;
          }
        }
        if (domains[id].empty()) {
          trace("inconsistent: node " + std::to_string(id) + " emptied by the " +
                std::string(label) + " pass");
          return -1;
        }
      }
      return any;
    };
    if (in.cons.max_cx) {
      const int r = counts_pass(*in.cons.max_cx, in.committed_cx,
                                [](const ResourceTuple& t) { return t.counts.cx; }, "cx");
      if (r < 0) return false;
      changed |= r > 0;
    }
    if (in.cons.max_single) {
      const int r =
          counts_pass(*in.cons.max_single, in.committed_single,
                      [](const ResourceTuple& t) { return t.counts.single; }, "single");
      if (r < 0) return false;
      changed |= r > 0;
    }

    // Depth pass: longest path of cheapest depths through each node, with
    // placed nodes pinned at their committed end depths.
    if (in.cons.max_depth) {
      const uint64_t limit = *in.cons.max_depth;
      std::vector<uint64_t> arrive(n, 0), leave(n, 0), tail(n, 0);
      for (NodeId id : in.topo) {
        uint64_t a = 0;
        for (NodeId p : g.nodes[id].preds) a = std::max(a, leave[p]);
        arrive[id] = a;
        leave[id] = in.states[id].placed ? in.states[id].end_depth : a + min_depth(id);
      }
      for (auto it = in.topo.rbegin(); it != in.topo.rend(); ++it) {
        const NodeId id = *it;
        uint64_t b = 0;
        for (NodeId s : g.nodes[id].succs) {
          const uint64_t need = in.states[s].placed ? 0 : min_depth(s);
          b = std::max(b, tail[s] + need);
        }
        tail[id] = b;
        if (in.states[id].placed && leave[id] + tail[id] > limit) {
          trace("inconsistent: placed node " + std::to_string(id) + " forces depth " +
                std::to_string(leave[id] + tail[id]));
          return false;
        }
      }
      for (NodeId id = 0; id < n; ++id) {
        if (in.states[id].placed) continue;
        for (uint32_t i = static_cast<uint32_t>(domains[id].size()); i-- > 0;) {
          const uint64_t total = arrive[id] + domains[id][i].depth + tail[id];
          if (total > limit) {
            trace("depth: node " + std::to_string(id) + " drops variant " +
                  std::to_string(domains[id][i].variant) + " (" + std::to_string(total) + " > " +
                  std::to_string(limit) + ")");
            remove_tuple(domains, journal, id, i);
            changed = true;
          }
        }
        if (domains[id].empty()) {
          trace("inconsistent: node " + std::to_string(id) + " emptied by the depth pass");
          return false;
        }
      }
    }

    // Width pass: a node can draw fresh qubits up to the budget gap plus the
    // pool, minus registers that must be live at that point, plus releases
    // that could still be scheduled ahead of it.
    if (in.cons.max_width) {
      const Reach reach(g, in.topo);
      std::vector<NodeId> allocs, frees;
      for (NodeId id = 0; id < n; ++id) {
        if (in.states[id].placed) continue;
        if (g.nodes[id].kind == NodeKind::Alloc) allocs.push_back(id);
        if (g.nodes[id].kind == NodeKind::Free) frees.push_back(id);
      }
      const int64_t base =
          int64_t{*in.cons.max_width} - int64_t{in.width_used} + int64_t{in.pool_free};
      for (NodeId id = 0; id < n; ++id) {
        if (in.states[id].placed || domains[id].empty()) continue;
        int64_t avail = base;
        for (NodeId a : allocs)
          if (a != id && reach.reaches(a, id)) avail -= node_width(g.nodes[a]);
        for (NodeId f : frees)
          if (f != id && !reach.reaches(id, f)) avail += node_width(g.nodes[f]);
        for (uint32_t i = static_cast<uint32_t>(domains[id].size()); i-- > 0;) {
          if (int64_t{domains[id][i].aux} > avail) {
            trace("width: node " + std::to_string(id) + " drops variant " +
                  std::to_string(domains[id][i].variant) + " (aux " +
                  std::to_string(domains[id][i].aux) + " > " + std::to_string(avail) + ")");
            remove_tuple(domains, journal, id, i);
            changed = true;
          }
        }
        if (domains[id].empty()) {
          trace("inconsistent: node " + std::to_string(id) + " emptied by the width pass");
          return false;
        }
      }
    }
  }
  return true;
}

uint64_t domain_hash(const std::vector<Domain>& domains) {
  uint64_t h = 1469598103934665603ull;
  const auto mix = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (const Domain& d : domains) {
    mix(d.size());
    for (const ResourceTuple& t : d) {
      mix(t.variant);
      mix(t.aux);
      mix(t.depth);
      mix(t.counts.cx);
      mix(t.counts.single);
    }
  }
  return h;
}

}  // namespace qsynth
