#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "qsynth/callgraph.hpp"
#include "qsynth/model.hpp"
#include "qsynth/solver.hpp"
#include "qsynth/stdlib.hpp"

using namespace qsynth;

namespace {

// Elementary-only scaffold: explicit dependencies, operand wires drawn from
// the entry register, distinct fns so the reducer can never group nodes.
Graph synth_graph(uint32_t entry_wires, const std::vector<std::vector<NodeId>>& preds,
                  const std::vector<std::vector<WireId>>& wires,
                  const std::vector<NodeKind>& kinds) {
  Graph g;
  g.num_entry_wires = entry_wires;
  g.num_wires = entry_wires;
  g.nodes.resize(preds.size());
  for (NodeId i = 0; i < preds.size(); ++i) {
    Node& n = g.nodes[i];
    n.kind = kinds[i];
    n.fn = mcx_fn(i);
    n.wires = wires[i];
    n.preds = preds[i];
    for (NodeId p : preds[i]) g.nodes[p].succs.push_back(i);
    for (WireId w : wires[i]) g.num_wires = std::max(g.num_wires, w + 1);
  }
  return g;
}

ResourceTuple tup(uint32_t variant, uint32_t aux, uint64_t depth, uint64_t cx,
                  uint64_t single = 0) {
  ResourceTuple t;
  t.variant = variant;
  t.aux = aux;
  t.depth = depth;
  t.counts = {cx, single};
  return t;
}

struct BruteOut {
  bool feasible = false;
  uint64_t value = 0;
};

// Independent optimum: every placement order, every tuple, every scratch
// subset of the released pool (not just contiguous windows). Scratch comes
// back clean at the node's end depth; partial width/depth/cx grow
// monotonically, so equal-or-worse partials can be cut against the best.
BruteOut brute_best(const Graph& g, const std::vector<Domain>& doms, const Constraints& cons,
                    Objective obj) {
  const uint32_t n = static_cast<uint32_t>(g.nodes.size());
  std::vector<uint64_t> ends(n, 0);
  BruteOut out;
  std::function<void(uint32_t, std::vector<uint64_t>, uint32_t, uint64_t, uint64_t, uint64_t)>
      rec = [&](uint32_t mask, std::vector<uint64_t> pool, uint32_t width, uint64_t cx,
                uint64_t single, uint64_t maxend) {
        if (cons.max_width && width > *cons.max_width) return;
        if (cons.max_depth && maxend > *cons.max_depth) return;
        if (cons.max_cx && cx > *cons.max_cx) return;
        if (cons.max_single && single > *cons.max_single) return;
        const uint64_t partial = obj == Objective::Width   ? width
                                 : obj == Objective::Depth ? maxend
                                 : obj == Objective::Cx    ? cx
                                                           : 0;
        if (mask == (1u << n) - 1) {
          if (!out.feasible || partial < out.value) {
            out.feasible = true;
            out.value = partial;
          }
          return;
        }
        if (out.feasible && obj != Objective::None && partial >= out.value) return;
        for (uint32_t i = 0; i < n; ++i) {
          if (mask & (1u << i)) continue;
          bool ready = true;
          uint64_t dep = 0;
          for (NodeId p : g.nodes[i].preds) {
            if (!(mask & (1u << p)))
              ready = false;
            else
              dep = std::max(dep, ends[p]);
          }
          if (!ready) continue;
          for (const ResourceTuple& t : doms[i]) {
            const uint32_t psize = static_cast<uint32_t>(pool.size());
            for (uint32_t sub = 0; sub < (1u << psize); ++sub) {
              const uint32_t k = static_cast<uint32_t>(__builtin_popcount(sub));
              if (k > t.aux) continue;
              uint64_t start = dep;
              std::vector<uint64_t> rest;
              for (uint32_t j = 0; j < psize; ++j) {
                if (sub & (1u << j))
                  start = std::max(start, pool[j]);
                else
                  rest.push_back(pool[j]);
              }
              const uint64_t end = start + t.depth;
              for (uint32_t a = 0; a < t.aux; ++a) rest.push_back(end);
              ends[i] = end;
              rec(mask | (1u << i), std::move(rest), width + t.aux - k, cx + t.counts.cx,
                  single + t.counts.single, std::max(maxend, end));
            }
          }
        }
      };
  rec(0, {}, g.num_entry_wires, 0, 0, 0);
  return out;
}

}  // namespace

TEST_CASE("exhausted search matches the subset-reuse brute-force optimum") {
  std::mt19937_64 rng(20260815);
  int infeasible = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const uint32_t n = 1 + static_cast<uint32_t>(rng() % 4);
    const uint32_t entry = 1 + static_cast<uint32_t>(rng() % 2);
    std::vector<std::vector<NodeId>> preds(n);
    std::vector<std::vector<WireId>> wires(n);
    const std::vector<NodeKind> kinds(n, NodeKind::Elementary);
    for (uint32_t j = 1; j < n; ++j)
      for (uint32_t i = 0; i < j; ++i)
        if (rng() % 100 < 45) preds[j].push_back(i);
    for (uint32_t i = 0; i < n; ++i) wires[i] = {static_cast<WireId>(rng() % entry)};
    Graph g = synth_graph(entry, preds, wires, kinds);

    const Objective obj =
        std::array{Objective::Width, Objective::Depth, Objective::Cx}[rng() % 3];
    std::vector<Domain> doms(n);
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t ntup = 1 + static_cast<uint32_t>(rng() % 3);
      for (uint32_t t = 0; t < ntup; ++t)
        doms[i].push_back(tup(t, static_cast<uint32_t>(rng() % 3), 1 + rng() % 6, rng() % 20,
                              rng() % 8));
      std::sort(doms[i].begin(), doms[i].end(),
                [obj](const ResourceTuple& a, const ResourceTuple& b) {
                  return tuple_less(a, b, obj);
                });
    }
    Constraints cons;
    if (rng() % 2) cons.max_width = entry + static_cast<uint32_t>(rng() % 4);

    const BruteOut want = brute_best(g, doms, cons, obj);
    SolveOptions opts;
    opts.seed = rng();
    opts.use_reducer = false;
    opts.budget.max_decisions = 5'000'000;
    const Solution got = solve_prepared(g, doms, cons, obj, opts);
    REQUIRE(got.stats.exhausted);
    REQUIRE(got.feasible == want.feasible);
    if (want.feasible) {
      REQUIRE(got.objective_value == want.value);
      REQUIRE(got.optimal);
    } else {
      ++infeasible;
    }
  }
  CHECK(infeasible > 0);
  CHECK(infeasible < 200);
}

TEST_CASE("sequential scratch is reused instead of widening the program") {
  // A then B on one entry wire, both needing 2 scratch qubits.
  Graph g = synth_graph(1, {{}, {0}}, {{0}, {0}}, {NodeKind::Elementary, NodeKind::Elementary});
  std::vector<Domain> doms{{tup(0, 2, 5, 10)}, {tup(0, 2, 7, 4)}};
  SolveOptions opts;
  const Solution s = solve_prepared(g, doms, Constraints{}, Objective::Width, opts);
  REQUIRE(s.feasible);
  REQUIRE(s.optimal);
  CHECK(s.objective_value == 3);
  CHECK(s.accounting.width == 3);
  CHECK(s.accounting.depth == 12);
  CHECK(s.accounting.counts.cx == 14);
  REQUIRE(s.order.size() == 2);
  CHECK(s.order[0].aux == std::vector<uint32_t>{1, 2});
  CHECK(s.order[1].aux == std::vector<uint32_t>{1, 2});
  CHECK(s.order[1].start == 5);
  CHECK(s.order[1].end == 12);
}

TEST_CASE("freed registers feed later scratch needs") {
  // Alloc{w1,w2} -> gate on w1 -> Free{w1,w2} -> gate on the entry wire
  // needing 2 scratch qubits: the freed pair covers it.
  Graph g = synth_graph(1, {{}, {0}, {1}, {2}},
                        {{1, 2}, {0, 1}, {1, 2}, {0}},
                        {NodeKind::Alloc, NodeKind::Elementary, NodeKind::Free,
                         NodeKind::Elementary});
  std::vector<Domain> doms{
      {tup(0, 2, 0, 0)}, {tup(0, 0, 3, 2)}, {tup(0, 0, 0, 0)}, {tup(0, 2, 4, 6)}};
  SolveOptions opts;
  const Solution s = solve_prepared(g, doms, Constraints{}, Objective::Width, opts);
  REQUIRE(s.feasible);
  REQUIRE(s.optimal);
  CHECK(s.objective_value == 3);
  REQUIRE(s.order.size() == 4);
  CHECK(s.order[0].aux == std::vector<uint32_t>{1, 2});   // alloc acquires fresh
  CHECK(s.order[3].aux == std::vector<uint32_t>{1, 2});   // reused after the free
  CHECK(s.order[3].start == 3);                           // release depth of the free
}

TEST_CASE("composite alternatives are searched and the graph is restored") {
  const char* text = R"({
    "entry": "main",
    "variables": [{"name": "q", "width": 1}],
    "functions": {
      "main": {"params": [{"name": "q", "kind": "qubit"}],
               "body": [{"select": [
                  [{"gate": "X", "operands": ["q"]}],
                  [{"gate": "H", "operands": ["q"]},
                   {"gate": "H", "operands": ["q"]},
                   {"gate": "H", "operands": ["q"]}]
               ]}]}
    }
  })";
  Graph g = lower(parse_model(text));
  const std::string before = to_dot(g);
  SolveOptions opts;
  const Solution s = solve(g, Constraints{}, Objective::Depth, opts);
  CHECK(to_dot(g) == before);
  REQUIRE(s.feasible);
  REQUIRE(s.optimal);
  CHECK(s.objective_value == 1);  // single X beats the three H layers
  CHECK(s.stats.expansions >= 2);
  bool saw_alt0 = false;
  for (const PlacedNode& p : s.order)
    if (p.node == 0 && p.alternative == 0) saw_alt0 = true;
  CHECK(saw_alt0);
}

TEST_CASE("interchangeable siblings collapse to one explored ordering") {
  const auto parallel_model = [] {
    std::string vars, params, body;
    for (int i = 0; i < 10; ++i) {
      const std::string q = "q" + std::to_string(i);
      if (i) {
        vars += ", ";
        params += ", ";
        body += ", ";
      }
      vars += "{\"name\": \"" + q + "\", \"width\": 1}";
      params += "{\"name\": \"" + q + "\", \"kind\": \"qubit\"}";
      body += "{\"gate\": \"X\", \"operands\": [\"" + q + "\"]}";
    }
    return "{\"entry\": \"main\", \"variables\": [" + vars +
           "], \"functions\": {\"main\": {\"params\": [" + params + "], \"body\": [" + body +
           "]}}}";
  }();

  SolveOptions chained;
  chained.enumerate_all = true;
  chained.use_reducer = true;
  Graph g1 = lower(parse_model(parallel_model));
  const Solution with_reducer = solve(g1, Constraints{}, Objective::None, chained);
  REQUIRE(with_reducer.feasible);
  CHECK(with_reducer.stats.leaves == 1);
  CHECK(with_reducer.stats.exhausted);

  SolveOptions open;
  open.enumerate_all = true;
  open.use_reducer = false;
  open.budget.max_leaves = 50;
  Graph g2 = lower(parse_model(parallel_model));
  const Solution without = solve(g2, Constraints{}, Objective::None, open);
  REQUIRE(without.feasible);
  CHECK(without.stats.leaves >= 10);
  CHECK_FALSE(without.stats.exhausted);

  CHECK(with_reducer.accounting == without.accounting);
  CHECK(with_reducer.accounting.width == 10);
  CHECK(with_reducer.accounting.depth == 1);
}

TEST_CASE("assignment and reuse decisions with nothing to prune skip propagation") {
  // Unconstrained single gate: one root propagation plus the completion
  // check; singleton assignment, count, and single-window steps add none.
  const char* text = R"({
    "entry": "main",
    "variables": [{"name": "q", "width": 1}],
    "functions": {
      "main": {"params": [{"name": "q", "kind": "qubit"}],
               "body": [{"gate": "X", "operands": ["q"]}]}
    }
  })";
  Graph g = lower(parse_model(text));
  SolveOptions opts;
  const Solution s = solve(g, Constraints{}, Objective::None, opts);
  REQUIRE(s.feasible);
  CHECK(s.stats.propagations == 2);
}

TEST_CASE("fixed seeds reproduce the whole solution byte for byte") {
  Graph g = synth_graph(2, {{}, {0}, {0}, {1, 2}}, {{0}, {1}, {0}, {1}},
                        std::vector<NodeKind>(4, NodeKind::Elementary));
  std::vector<Domain> doms{{tup(0, 1, 2, 9), tup(1, 2, 1, 3)},
                           {tup(0, 0, 4, 12), tup(1, 1, 2, 5)},
                           {tup(0, 2, 3, 7)},
                           {tup(0, 1, 1, 2), tup(1, 0, 6, 1)}};
  Constraints cons;
  cons.max_width = 5;
  SolveOptions opts;
  opts.seed = 424242;
  const Solution a = solve_prepared(g, doms, cons, Objective::Cx, opts);
  const Solution b = solve_prepared(g, doms, cons, Objective::Cx, opts);
  REQUIRE(a.feasible);
  CHECK(a.order == b.order);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.accounting == b.accounting);
  CHECK(a.stats.decisions == b.stats.decisions);
  CHECK(a.stats.propagations == b.stats.propagations);
  CHECK(a.stats.leaves == b.stats.leaves);

  SolveOptions other = opts;
  other.seed = 7;
  const Solution c = solve_prepared(g, doms, cons, Objective::Cx, other);
  CHECK(c.objective_value == a.objective_value);  // optimum is seed independent
}

TEST_CASE("strategy lineup follows the resource envelope") {
  using K = StrategyKind;
  Constraints none;
  CHECK(select_strategies(none, Objective::None) == std::vector{K::GreedyReuse});

  Constraints w;
  w.max_width = 8;
  CHECK(select_strategies(w, Objective::None) == std::vector{K::MinWidth, K::GreedyReuse});

  Constraints d;
  d.max_depth = 100;
  CHECK(select_strategies(d, Objective::None) == std::vector{K::MinDepth});

  Constraints dw = w;
  dw.max_depth = 100;
  CHECK(select_strategies(dw, Objective::None) == std::vector{K::MinDepthMinReuse});

  CHECK(select_strategies(none, Objective::Width) ==
        std::vector{K::MinWidth, K::GreedyReuse});
  CHECK(select_strategies(none, Objective::Depth) == std::vector{K::MinDepth});
  CHECK(select_strategies(none, Objective::Cx) == std::vector{K::GreedyReuse, K::Random});

  Constraints cx;
  cx.max_cx = 50;
  CHECK(select_strategies(cx, Objective::None) == std::vector{K::GreedyReuse, K::Random});
}

TEST_CASE("budget exhaustion and proven infeasibility are reported as such") {
  Graph g = synth_graph(2, {{}, {0}}, {{0}, {1}},
                        std::vector<NodeKind>(2, NodeKind::Elementary));
  std::vector<Domain> doms{{tup(0, 2, 3, 5)}, {tup(0, 1, 2, 4)}};

  Constraints tight;
  tight.max_width = 1;  // below the entry register
  SolveOptions opts;
  const Solution infeasible = solve_prepared(g, doms, tight, Objective::Width, opts);
  CHECK_FALSE(infeasible.feasible);
  CHECK_FALSE(infeasible.optimal);
  CHECK(infeasible.stats.exhausted);

  SolveOptions starved;
  starved.budget.max_decisions = 1;
  starved.run_strategies = false;
  const Solution cut = solve_prepared(g, doms, Constraints{}, Objective::Width, starved);
  CHECK_FALSE(cut.stats.exhausted);
  CHECK_FALSE(cut.optimal);
}
