#ifndef QSYNTH_CALLGRAPH_HPP
#define QSYNTH_CALLGRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsynth/model.hpp"
#include "qsynth/stdlib.hpp"

namespace qsynth {

struct LoweringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using NodeId = uint32_t;
using WireId = uint32_t;

// Elementary: one library call on `wires` (controls first). Alloc/Free open
// and close logical wires. Composite: interchangeable alternatives, expanded
// during search. Barrier: zero-cost ordering fence left by an expansion.
enum class NodeKind : uint8_t { Elementary, Alloc, Free, Composite, Barrier };

struct Fragment;

struct Node {
  NodeKind kind = NodeKind::Elementary;
  LibFn fn;
  std::vector<WireId> wires;
  std::vector<NodeId> preds, succs;              // data dependencies
  std::vector<NodeId> order_preds, order_succs;  // reducer ordering only
  std::vector<Fragment> alternatives;            // Composite
};

// Alternative body lowered against the enclosing scope: nodes use graph
// global wire ids, edges are fragment-local indices.
struct Fragment {
  std::vector<Node> nodes;
};

struct Graph {
  std::vector<Node> nodes;
  uint32_t num_wires = 0;
  uint32_t num_entry_wires = 0;
};

// Inline calls, unroll repeats, distribute controls (with uncontrolled X
// conjugation of zero bits), invert bodies, and collect selects into
// composite nodes. Node order is a topological order by construction.
Graph lower(const Model& m);

// Chain interchangeable siblings (same function, same dependencies) with
// ordering edges so the search explores one representative order. Ordering
// edges never enter metric computations. Idempotent.
void reduce(Graph& g);

std::vector<NodeId> ready_nodes(const Graph& g, const std::vector<bool>& placed);

std::string to_dot(const Graph& g);

// Splice one alternative in place of a composite: the composite becomes a
// begin barrier, fragment nodes are appended, and an end barrier takes over
// the composite's successors. Reversible via undo_expand in LIFO order.
struct Expansion {
  NodeId composite = 0;
  NodeId end_barrier = 0;
  uint32_t first_new_node = 0;
  std::vector<NodeId> moved_succs;
};

Expansion expand(Graph& g, NodeId composite, size_t alternative);
void undo_expand(Graph& g, const Expansion& e);

}  // namespace qsynth

#endif
