#include "qsynth/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>

namespace qsynth {
namespace {

constexpr uint32_t kUnassigned = UINT32_MAX;

using Clock = std::chrono::steady_clock;

// Depth-first branch-and-bound. Every decision layer (next node, tuple,
// reuse count, reuse window, composite alternative) undoes its own effects
// before returning, so the searcher is pristine after each pass; aborts
// (budget, first-feasible, zero objective) unwind through the same paths.
struct Searcher {
  Graph& g;
  Constraints cons;
  Objective obj;
  const SolveOptions& opts;

  std::vector<Domain> domains;
  std::vector<NodeState> states;
  DomainJournal journal;
  std::vector<NodeId> topo;
  std::vector<uint32_t> phys;  // wire -> physical qubit
  QubitPool pool;
  uint64_t committed_cx = 0;
  uint64_t committed_single = 0;
  uint32_t width_used = 0;
  uint32_t placed_count = 0;
  std::vector<PlacedNode> order;

  std::mt19937_64 rng;
  StrategyKind strat = StrategyKind::GreedyReuse;
  bool dive = false;       // follow the strategy's first choice only
  bool use_order = false;  // honor reducer edges in readiness
  bool must_propagate = false;
  std::optional<uint64_t> bound;  // strict improvement bound from the incumbent

  Solution best;
  SolveStats stats;
  Clock::time_point t0 = Clock::now();
  bool budget_hit = false;
  bool done = false;  // feasibility satisfied or objective hit zero

  Searcher(Graph& graph, std::vector<Domain> doms, const Constraints& c, Objective o,
           const SolveOptions& op)
      : g(graph), cons(c), obj(o), opts(op), domains(std::move(doms)), rng(op.seed) {
    states.resize(g.nodes.size());
    topo = topological_order(g);
    phys.assign(g.num_wires, kUnassigned);
    for (uint32_t w = 0; w < g.num_entry_wires; ++w) phys[w] = w;
    width_used = g.num_entry_wires;
  }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }

  bool out_of_budget() {
    if (budget_hit) return true;
    if (stats.decisions > opts.budget.max_decisions ||
        ((stats.decisions & 0x3F) == 0 && elapsed_ms() > opts.budget.max_wall_ms)) {
      budget_hit = true;
      return true;
    }
    return false;
  }

  Constraints effective() const {
    Constraints c = cons;
    if (!bound) return c;
    const auto cap = [](std::optional<uint64_t>& slot, uint64_t v) {
      slot = slot ? std::min(*slot, v) : v;
    };
    switch (obj) {
      case Objective::Width: {
        const uint32_t v = static_cast<uint32_t>(std::min<uint64_t>(*bound, UINT32_MAX));
        c.max_width = c.max_width ? std::min(*c.max_width, v) : v;
        break;
      }
      case Objective::Depth:
        cap(c.max_depth, *bound);
        break;
      case Objective::Cx:
        cap(c.max_cx, *bound);
        break;
      case Objective::None:
        break;
    }
    return c;
  }

  bool run_propagate() {
    ++stats.propagations;
    PropagationInput in{g, topo, effective(), states};
    in.committed_cx = committed_cx;
    in.committed_single = committed_single;
    in.width_used = width_used;
    in.pool_free = static_cast<uint32_t>(pool.size());
    in.trace = opts.trace;
    return propagate(in, domains, journal);
  }

  uint64_t dep_depth(NodeId id) const {
    uint64_t d = 0;
    for (NodeId p : g.nodes[id].preds) {
      assert(states[p].placed);
      d = std::max(d, states[p].end_depth);
    }
    return d;
  }

  // Pool qubits an eventual placement of the node hands back.
  uint32_t release_potential(NodeId id) const {
    const Node& n = g.nodes[id];
    if (n.kind == NodeKind::Free) return static_cast<uint32_t>(n.wires.size());
    if (n.kind == NodeKind::Elementary) {
      uint32_t m = 0;
      for (const ResourceTuple& t : domains[id]) m = std::max(m, t.aux);
      return m;
    }
    return 0;
  }

  uint32_t enabled_successors(NodeId id) const {
    uint32_t count = 0;
    for (NodeId s : g.nodes[id].succs) {
      bool ready = true;
      for (NodeId p : g.nodes[s].preds)
        if (p != id && !states[p].placed) ready = false;
      if (ready) ++count;
    }
    return count;
  }

  std::vector<NodeId> ready_candidates() const {
    std::vector<NodeId> cands;
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
      if (states[i].placed) continue;
      bool ready = true;
      for (NodeId p : g.nodes[i].preds)
        if (!states[p].placed) ready = false;
      if (ready && use_order)
        for (NodeId p : g.nodes[i].order_preds)
          if (!states[p].placed) ready = false;
      if (ready) cands.push_back(i);
    }
    return cands;
  }

  std::vector<NodeId> choose_candidates() {
    std::vector<NodeId> cands = ready_candidates();
    if (!dive || cands.size() <= 1) return cands;  // full pass: ascending id
    if (strat == StrategyKind::Random) return {cands[rng() % cands.size()]};
    NodeId pick = cands[0];
    uint32_t best_rel = release_potential(pick);
    uint32_t best_en = enabled_successors(pick);
    for (size_t i = 1; i < cands.size(); ++i) {
      const uint32_t rel = release_potential(cands[i]);
      const uint32_t en = enabled_successors(cands[i]);
      if (rel > best_rel || (rel == best_rel && en > best_en)) {
        pick = cands[i];
        best_rel = rel;
        best_en = en;
      }
    }
    return {pick};
  }

  std::vector<uint32_t> choose_values(const Domain& menu) {
    std::vector<uint32_t> idxs;
    if (!dive || menu.size() <= 1) {
      for (uint32_t i = 0; i < menu.size(); ++i) idxs.push_back(i);
      return idxs;
    }
    switch (strat) {
      case StrategyKind::Random:
        return {static_cast<uint32_t>(rng() % menu.size())};
      case StrategyKind::MinWidth: {
        uint32_t pick = 0;
        for (uint32_t i = 1; i < menu.size(); ++i)
          if (menu[i].aux < menu[pick].aux) pick = i;
        return {pick};
      }
      case StrategyKind::MinDepth:
      case StrategyKind::MinDepthMinReuse: {
        uint32_t pick = 0;
        for (uint32_t i = 1; i < menu.size(); ++i)
          if (menu[i].depth < menu[pick].depth) pick = i;
        return {pick};
      }
      case StrategyKind::GreedyReuse: {
        double avg = 0;
        for (const ResourceTuple& t : menu) avg += t.aux;
        avg /= static_cast<double>(menu.size());
        uint32_t pick = 0;
        double best_d = std::fabs(menu[0].aux - avg);
        for (uint32_t i = 1; i < menu.size(); ++i) {
          const double d = std::fabs(menu[i].aux - avg);
          if (d < best_d) {
            pick = i;
            best_d = d;
          }
        }
        return {pick};
      }
    }
    return {0};
  }

  std::vector<uint32_t> choose_counts(NodeId id, const ReuseBounds& b) {
    std::vector<uint32_t> ks;
    if (!dive || b.k_min == b.k_max) {
      for (uint32_t k = b.k_max;; --k) {
        ks.push_back(k);
        if (k == b.k_min) break;
      }
      return ks;
    }
    switch (strat) {
      case StrategyKind::Random:
        return {b.k_min + static_cast<uint32_t>(rng() % (b.k_max - b.k_min + 1))};
      case StrategyKind::MinDepthMinReuse:
        return {b.k_min};
      case StrategyKind::MinDepth: {
        // Deepest reuse that still starts at the dependency depth.
        const uint64_t dep = dep_depth(id);
        uint32_t pick = b.k_min;
        for (uint32_t k = b.k_min; k <= b.k_max; ++k) {
          const uint32_t begin = static_cast<uint32_t>(pool.size()) - k;
          if (window_ceiling(pool, begin, k) <= dep) pick = k;
        }
        return {pick};
      }
      case StrategyKind::GreedyReuse:
      case StrategyKind::MinWidth:
        return {b.k_max};
    }
    return {b.k_max};
  }

  std::vector<uint32_t> choose_windows(const std::vector<uint32_t>& begins) {
    if (!dive || begins.size() <= 1) return begins;  // shallowest ceiling first
    if (strat == StrategyKind::Random) return {begins[rng() % begins.size()]};
    return {begins[0]};
  }

  std::vector<size_t> choose_alternatives(size_t n) {
    std::vector<size_t> alts;
    if (!dive || n <= 1) {
      for (size_t i = 0; i < n; ++i) alts.push_back(i);
      return alts;
    }
    if (strat == StrategyKind::Random) return {rng() % n};
    return {0};
  }

  // Complete placement: validate committed totals, record or improve the
  // incumbent, and tighten the bound for the remaining search.
  bool leaf() {
    if (!run_propagate()) return false;
    ++stats.leaves;
    uint64_t depth = 0;
    for (const PlacedNode& p : order) depth = std::max(depth, p.end);
    uint64_t value = 0;
    switch (obj) {
      case Objective::Width:
        value = width_used;
        break;
      case Objective::Depth:
        value = depth;
        break;
      case Objective::Cx:
        value = committed_cx;
        break;
      case Objective::None:
        break;
    }
    const bool better = !best.feasible || (obj != Objective::None && value < best.objective_value);
    if (better) {
      best.feasible = true;
      best.order = order;
      best.accounting = Metrics{width_used, depth, GateCounts{committed_cx, committed_single}};
      best.objective_value = value;
      if (obj != Objective::None && !opts.enumerate_all) {
        if (value == 0) {
          done = true;
          return true;
        }
        bound = value - 1;
        must_propagate = true;
      }
    }
    if (opts.enumerate_all) {
      if (opts.budget.max_leaves && stats.leaves >= opts.budget.max_leaves) {
        budget_hit = true;
        return true;
      }
      return false;
    }
    if (obj == Objective::None) {
      done = true;
      return true;
    }
    return false;
  }

  bool place_next() {
    if (out_of_budget()) return true;
    if (placed_count == g.nodes.size()) return leaf();
    if (must_propagate) {
      must_propagate = false;
      if (!run_propagate()) {
        must_propagate = true;
        return false;
      }
    }
    const std::vector<NodeId> cands = choose_candidates();
    assert(!cands.empty());
    for (NodeId cand : cands) {
      ++stats.decisions;
      if (out_of_budget()) return true;
      if (do_node(cand)) return true;
    }
    return false;
  }

  bool do_node(NodeId id) {
    if (g.nodes[id].kind == NodeKind::Composite) return do_logic_flow(id);
    return do_values(id);
  }

  bool do_logic_flow(NodeId id) {
    const std::vector<size_t> alts = choose_alternatives(g.nodes[id].alternatives.size());
    for (size_t alt : alts) {
      ++stats.decisions;
      if (out_of_budget()) return true;
      const size_t jm = journal.mark();
      const size_t old_nodes = g.nodes.size();
      const Expansion e = expand(g, id, alt);
      ++stats.expansions;
      domains.resize(g.nodes.size());
      for (NodeId n = static_cast<NodeId>(old_nodes); n < g.nodes.size(); ++n)
        domains[n] = node_menu(g.nodes[n], cons, obj, g.num_entry_wires);
      states.resize(g.nodes.size());
      topo = topological_order(g);
      const uint64_t start = dep_depth(id);
      states[id] = NodeState{true, ResourceTuple{}, start};
      order.push_back(
          PlacedNode{id, NodeKind::Composite, LibFn{}, ResourceTuple{}, start, start, {}, {}, alt});
      ++placed_count;
      const bool abort = place_next();  // expansion itself prunes nothing
      --placed_count;
      order.pop_back();
      states[id] = NodeState{};
      journal.undo_to(jm, domains);
      domains.resize(old_nodes);
      states.resize(old_nodes);
      undo_expand(g, e);
      topo = topological_order(g);
      if (abort) return true;
    }
    return false;
  }

  bool do_values(NodeId id) {
    const Domain menu = domains[id];
    if (menu.empty()) return false;
    const std::vector<uint32_t> idxs = choose_values(menu);
    for (uint32_t idx : idxs) {
      ++stats.decisions;
      if (out_of_budget()) return true;
      const size_t jm = journal.mark();
      for (uint32_t i = static_cast<uint32_t>(menu.size()); i-- > 0;)
        if (i != idx) remove_tuple(domains, journal, id, i);
      bool ok = true;
      if (menu.size() > 1) ok = run_propagate();  // singleton assignments add nothing
      bool abort = false;
      if (ok) abort = do_reuse_count(id, menu[idx]);
      journal.undo_to(jm, domains);
      if (abort) return true;
    }
    return false;
  }

  bool do_reuse_count(NodeId id, const ResourceTuple& tuple) {
    const Constraints eff = effective();
    const ReuseBounds b = reuse_bounds(tuple.aux, width_used, eff.max_width, pool.size());
    if (b.k_min > b.k_max) return false;
    const std::vector<uint32_t> ks = choose_counts(id, b);
    for (uint32_t k : ks) {
      ++stats.decisions;
      if (out_of_budget()) return true;
      // The count alone pins no depths and no qubits: no propagation here.
      if (do_reuse_options(id, tuple, k)) return true;
    }
    return false;
  }

  bool do_reuse_options(NodeId id, const ResourceTuple& tuple, uint32_t k) {
    const std::vector<uint32_t> all_begins = reuse_windows(pool.size(), k);
    const size_t noptions = all_begins.size();
    const std::vector<uint32_t> begins = choose_windows(all_begins);
    const uint64_t dep = dep_depth(id);
    const NodeKind kind = g.nodes[id].kind;
    const LibFn fn = g.nodes[id].fn;
    const std::vector<WireId> wires = g.nodes[id].wires;
    for (uint32_t begin : begins) {
      ++stats.decisions;
      if (out_of_budget()) return true;
      const size_t jm = journal.mark();
      const uint64_t ceiling = window_ceiling(pool, begin, k);
      const std::vector<PoolEntry> taken = pool.take(begin, k);
      const uint32_t fresh = tuple.aux - k;
      const uint32_t base = width_used;
      width_used += fresh;
      std::vector<uint32_t> aux_ids;
      aux_ids.reserve(tuple.aux);
      for (const PoolEntry& pe : taken) aux_ids.push_back(pe.qubit);
      for (uint32_t i = 0; i < fresh; ++i) aux_ids.push_back(base + i);
      const uint64_t start = std::max(dep, ceiling);
      const uint64_t end = start + tuple.depth;
      std::vector<uint32_t> ops;
      if (kind == NodeKind::Elementary || kind == NodeKind::Free) {
        ops.reserve(wires.size());
        for (WireId w : wires) {
          assert(phys[w] != kUnassigned);
          ops.push_back(phys[w]);
        }
      }
      if (kind == NodeKind::Alloc)
        for (size_t i = 0; i < wires.size(); ++i) phys[wires[i]] = aux_ids[i];
      if (kind == NodeKind::Elementary)  // scratch is clean again at the end
        for (uint32_t q : aux_ids) pool.insert(PoolEntry{q, end, id});
      if (kind == NodeKind::Free)
        for (uint32_t q : ops) pool.insert(PoolEntry{q, end, id});
      committed_cx += tuple.counts.cx;
      committed_single += tuple.counts.single;
      states[id] = NodeState{true, tuple, end};
      order.push_back(PlacedNode{id, kind, fn, tuple, start, end, ops, aux_ids, 0});
      ++placed_count;
      const bool skip = !effective().max_depth || start == dep || noptions <= 1;
      const bool ok = skip ? true : run_propagate();
      const bool abort = ok ? place_next() : false;
      --placed_count;
      order.pop_back();
      states[id] = NodeState{};
      committed_cx -= tuple.counts.cx;
      committed_single -= tuple.counts.single;
      if (kind == NodeKind::Free)
        for (uint32_t q : ops) pool.erase_qubit(q);
      if (kind == NodeKind::Elementary)
        for (uint32_t q : aux_ids) pool.erase_qubit(q);
      if (kind == NodeKind::Alloc)
        for (WireId w : wires) phys[w] = kUnassigned;
      width_used -= fresh;
      pool.put_back(taken);
      journal.undo_to(jm, domains);
      if (abort) return true;
    }
    return false;
  }
};

}  // namespace

std::vector<StrategyKind> select_strategies(const Constraints& cons, Objective obj) {
  const bool d = cons.max_depth.has_value() || obj == Objective::Depth;
  const bool w = cons.max_width.has_value() || obj == Objective::Width;
  std::vector<StrategyKind> v;
  if (d && w)
    v = {StrategyKind::MinDepthMinReuse};
  else if (d)
    v = {StrategyKind::MinDepth};
  else if (w)
    v = {StrategyKind::MinWidth, StrategyKind::GreedyReuse};
  else
    v = {StrategyKind::GreedyReuse};
  if (cons.max_cx || cons.max_single || obj == Objective::Cx) v.push_back(StrategyKind::Random);
  return v;
}

Solution solve_prepared(Graph& g, std::vector<Domain> domains, const Constraints& cons,
                        Objective obj, const SolveOptions& opts) {
  if (opts.use_reducer) reduce(g);
  Searcher s(g, std::move(domains), cons, obj, opts);
  if (!s.run_propagate()) {
    Solution out;
    out.stats = s.stats;
    out.stats.exhausted = true;
    out.stats.wall_ms = s.elapsed_ms();
    return out;  // proven infeasible before any decision
  }
  if (opts.run_strategies && !opts.enumerate_all) {
    for (StrategyKind k : select_strategies(cons, obj)) {
      s.strat = k;
      s.dive = true;
      s.use_order = false;
      s.place_next();
      if (s.budget_hit || s.done) break;
    }
  }
  if (!s.budget_hit && !s.done) {
    s.dive = false;
    s.use_order = opts.use_reducer;
    s.place_next();
  }
  Solution out = std::move(s.best);
  out.stats = s.stats;
  out.stats.exhausted = !s.budget_hit;
  out.stats.wall_ms = s.elapsed_ms();
  out.optimal = out.feasible && !s.budget_hit;
  return out;
}

Solution solve(Graph& g, const Constraints& cons, Objective obj, const SolveOptions& opts) {
  return solve_prepared(g, initialize_domains(g, cons, obj), cons, obj, opts);
}

}  // namespace qsynth
