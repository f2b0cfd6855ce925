#ifndef QSYNTH_SOLVER_HPP
#define QSYNTH_SOLVER_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qsynth/callgraph.hpp"
#include "qsynth/circuit.hpp"
#include "qsynth/domains.hpp"
#include "qsynth/reuse.hpp"

namespace qsynth {

struct Budget {
  uint64_t max_decisions = 2'000'000;
  double max_wall_ms = 1'000'000.0;
  uint64_t max_leaves = 0;  // 0: unlimited; used by enumeration mode
};

struct SolveOptions {
  uint64_t seed = 0;
  Budget budget;
  bool use_reducer = true;     // chain interchangeable siblings during the full pass
  bool run_strategies = true;  // greedy dives before the full pass
  bool enumerate_all = false;  // count every complete placement instead of stopping
  std::ostream* trace = nullptr;
};

// One scheduled node: the tuple it committed to, its accounting interval,
// and the physical qubits it runs on. `operands` are the node's wires mapped
// to physical ids; `aux` are the scratch (or, for Alloc, acquired) qubits.
// Kind and fn are copied in so a solution outlives undone expansions.
struct PlacedNode {
  NodeId node = 0;
  NodeKind kind = NodeKind::Elementary;
  LibFn fn;
  ResourceTuple tuple;
  uint64_t start = 0;
  uint64_t end = 0;
  std::vector<uint32_t> operands;
  std::vector<uint32_t> aux;
  size_t alternative = 0;  // Composite only

  bool operator==(const PlacedNode&) const = default;
};

struct SolveStats {
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t leaves = 0;
  uint64_t expansions = 0;
  bool exhausted = false;  // search space fully explored within budget
  double wall_ms = 0.0;
};

struct Solution {
  bool feasible = false;
  bool optimal = false;  // feasible and the search was exhausted (or objective hit zero)
  std::vector<PlacedNode> order;
  Metrics accounting;  // node-granular schedule metrics, not gate-level depth
  uint64_t objective_value = 0;
  SolveStats stats;
};

enum class StrategyKind : uint8_t { GreedyReuse, MinWidth, MinDepth, MinDepthMinReuse, Random };

// Dive lineup for the given resource envelope; the full search always runs
// afterwards and keeps whatever incumbent the dives produced.
std::vector<StrategyKind> select_strategies(const Constraints& cons, Objective obj);

// Branch-and-bound over placement order, implementation tuples, reuse counts
// and reuse windows. Mutates `g` (reduction, transient expansions) but
// restores expansions before returning.
Solution solve(Graph& g, const Constraints& cons, Objective obj, const SolveOptions& opts);

// Same search on caller-supplied menus; `domains[i]` must describe node i.
Solution solve_prepared(Graph& g, std::vector<Domain> domains, const Constraints& cons,
                        Objective obj, const SolveOptions& opts);

}  // namespace qsynth

#endif
