#ifndef QSYNTH_REUSE_HPP
#define QSYNTH_REUSE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qsynth/callgraph.hpp"

namespace qsynth {

struct PoolEntry {
  uint32_t qubit = 0;
  uint64_t release_depth = 0;
  NodeId producer = 0;

  bool operator==(const PoolEntry&) const = default;
};

// Released qubits ordered deepest release first (ties: lowest id). Windows
// of k consecutive entries are exactly the nondominated k-subsets: swapping
// any other subset toward a window never raises its own release ceiling and
// never takes shallower entries away from later consumers.
class QubitPool {
 public:
  void insert(PoolEntry e);
  void erase_qubit(uint32_t qubit);
  std::vector<PoolEntry> take(size_t begin, size_t count);
  void put_back(const std::vector<PoolEntry>& taken);
  const std::vector<PoolEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

 private:
  std::vector<PoolEntry> entries_;
};

// How many pool qubits a node drawing `need` fresh-or-reused qubits must and
// may take: at least the overflow past the width budget, at most what the
// pool holds or the node can absorb. k_min > k_max means a dead end.
struct ReuseBounds {
  uint32_t k_min = 0;
  uint32_t k_max = 0;
};
ReuseBounds reuse_bounds(uint32_t need, uint32_t width_used,
                         const std::optional<uint32_t>& max_width, size_t pool_size);

// Window start offsets for k reused qubits, shallowest ceiling first; the
// single empty window when k is zero.
std::vector<uint32_t> reuse_windows(size_t pool_size, uint32_t k);

// Latest release depth inside the window: the start-depth floor it imposes.
uint64_t window_ceiling(const QubitPool& pool, uint32_t begin, uint32_t k);

}  // namespace qsynth

#endif
