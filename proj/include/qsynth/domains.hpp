#ifndef QSYNTH_DOMAINS_HPP
#define QSYNTH_DOMAINS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qsynth/callgraph.hpp"
#include "qsynth/circuit.hpp"

namespace qsynth {

enum class Objective : uint8_t { None, Width, Depth, Cx };

struct Constraints {
  std::optional<uint32_t> max_width;
  std::optional<uint64_t> max_depth;
  std::optional<uint64_t> max_cx;
  std::optional<uint64_t> max_single;

  bool any() const { return max_width || max_depth || max_cx || max_single; }
};

// One admissible implementation choice for a node. Alloc nodes carry their
// register width as aux so the width pass covers them uniformly; Free,
// Composite, and Barrier nodes hold a single zero tuple.
struct ResourceTuple {
  uint32_t variant = 0;
  uint32_t aux = 0;
  uint64_t depth = 0;
  GateCounts counts;

  bool operator==(const ResourceTuple&) const = default;
};

using Domain = std::vector<ResourceTuple>;

// Canonical order: objective coordinate first, then aux, cx, depth, variant.
bool tuple_less(const ResourceTuple& a, const ResourceTuple& b, Objective obj);

// Search-side view of one node, maintained by the solver.
struct NodeState {
  bool placed = false;
  ResourceTuple committed;  // valid when placed
  uint64_t end_depth = 0;   // node-granular accounting end when placed
};

// Removal log. Undoing re-inserts tuples at their original positions in
// reverse order, restoring every domain byte for byte.
struct DomainJournal {
  struct Record {
    NodeId node = 0;
    uint32_t index = 0;
    ResourceTuple tuple;
  };
  std::vector<Record> records;

  size_t mark() const { return records.size(); }
  void undo_to(size_t mark, std::vector<Domain>& domains);
};

void remove_tuple(std::vector<Domain>& domains, DomainJournal& journal, NodeId node,
                  uint32_t index);

// Menu for one node: variant profiles filtered by coarse constraint
// truncation and dominance, canonically sorted; when nothing constrains the
// problem the menu collapses to its best tuple.
Domain node_menu(const Node& n, const Constraints& cons, Objective obj, uint32_t entry_wires);

// node_menu applied to every node of the graph.
std::vector<Domain> initialize_domains(const Graph& g, const Constraints& cons, Objective obj);

std::vector<NodeId> topological_order(const Graph& g);

struct PropagationInput {
  const Graph& graph;
  const std::vector<NodeId>& topo;
  Constraints cons;
  const std::vector<NodeState>& states;
  uint64_t committed_cx = 0;
  uint64_t committed_single = 0;
  uint32_t width_used = 0;  // distinct physical qubits drawn so far
  uint32_t pool_free = 0;   // released qubits available for reuse
  std::ostream* trace = nullptr;
};

// Run count, depth, and width passes to a fixpoint, logging removals in the
// journal. Returns false when some domain empties or the committed part
// already violates a constraint.
bool propagate(const PropagationInput& in, std::vector<Domain>& domains, DomainJournal& journal);

uint64_t domain_hash(const std::vector<Domain>& domains);

}  // namespace qsynth

#endif
