#include "qsynth/reuse.hpp"

#include <algorithm>
#include <stdexcept>

namespace qsynth {

namespace {

bool pool_order(const PoolEntry& a, const PoolEntry& b) {
  if (a.release_depth != b.release_depth) return a.release_depth > b.release_depth;
  return a.qubit < b.qubit;
}

}  // namespace

void QubitPool::insert(PoolEntry e) {
  const auto it = std::upper_bound(entries_.begin(), entries_.end(), e, pool_order);
  entries_.insert(it, e);
}

void QubitPool::erase_qubit(uint32_t qubit) {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const PoolEntry& e) { return e.qubit == qubit; });
  if (it == entries_.end()) throw std::logic_error("pool entry to erase is missing");
  entries_.erase(it);
}

std::vector<PoolEntry> QubitPool::take(size_t begin, size_t count) {
  if (begin + count > entries_.size()) throw std::logic_error("pool window out of range");
  std::vector<PoolEntry> out(entries_.begin() + begin, entries_.begin() + begin + count);
  entries_.erase(entries_.begin() + begin, entries_.begin() + begin + count);
  return out;
}

void QubitPool::put_back(const std::vector<PoolEntry>& taken) {
  for (const PoolEntry& e : taken) insert(e);
}

ReuseBounds reuse_bounds(uint32_t need, uint32_t width_used,
                         const std::optional<uint32_t>& max_width, size_t pool_size) {
  ReuseBounds b;
  b.k_max = std::min<uint32_t>(need, static_cast<uint32_t>(pool_size));
  if (max_width) {
    const int64_t overflow = int64_t{width_used} + int64_t{need} - int64_t{*max_width};
    if (overflow > 0) b.k_min = static_cast<uint32_t>(overflow);
  }
  return b;
}

std::vector<uint32_t> reuse_windows(size_t pool_size, uint32_t k) {
  if (k == 0) return {0};
  if (k > pool_size) return {};
  std::vector<uint32_t> begins;
  for (uint32_t b = static_cast<uint32_t>(pool_size - k);; --b) {
    begins.push_back(b);
    if (b == 0) break;
  }
  return begins;
}

uint64_t window_ceiling(const QubitPool& pool, uint32_t begin, uint32_t k) {
  if (k == 0) return 0;
  return pool.entries()[begin].release_depth;
}

}  // namespace qsynth
