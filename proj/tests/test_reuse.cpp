#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "qsynth/reuse.hpp"

using namespace qsynth;

namespace {

QubitPool pool_of(std::vector<uint64_t> depths) {
  QubitPool p;
  for (size_t i = 0; i < depths.size(); ++i)
    p.insert({static_cast<uint32_t>(i), depths[i], 0});
  return p;
}

std::vector<uint64_t> depths_of(const QubitPool& p) {
  std::vector<uint64_t> out;
  for (const PoolEntry& e : p.entries()) out.push_back(e.release_depth);
  return out;
}

}  // namespace

TEST_CASE("the pool keeps deepest-first order with id tiebreaks") {
  std::mt19937_64 rng(7);
  QubitPool p;
  std::vector<PoolEntry> inserted;
  for (uint32_t q = 0; q < 40; ++q) {
    const PoolEntry e{q, rng() % 5, 0};  // few depth values force ties
    inserted.push_back(e);
    p.insert(e);
  }
  REQUIRE(p.size() == 40);
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    const PoolEntry& a = p.entries()[i];
    const PoolEntry& b = p.entries()[i + 1];
    CHECK((a.release_depth > b.release_depth ||
           (a.release_depth == b.release_depth && a.qubit < b.qubit)));
  }
}

TEST_CASE("windows over a three-entry pool list shallowest ceiling first") {
  const QubitPool p = pool_of({800, 440, 150});
  CHECK(depths_of(p) == std::vector<uint64_t>{800, 440, 150});

  const auto begins = reuse_windows(p.size(), 2);
  REQUIRE(begins == std::vector<uint32_t>{1, 0});
  std::vector<std::vector<uint64_t>> windows;
  for (uint32_t b : begins) {
    std::vector<uint64_t> w;
    for (uint32_t i = b; i < b + 2; ++i) w.push_back(p.entries()[i].release_depth);
    windows.push_back(w);
  }
  const std::vector<std::vector<uint64_t>> want = {{440, 150}, {800, 440}};
  CHECK(windows == want);
  CHECK(window_ceiling(p, begins[0], 2) == 440);
  CHECK(window_ceiling(p, begins[1], 2) == 800);

  CHECK(reuse_windows(3, 0) == std::vector<uint32_t>{0});
  CHECK(reuse_windows(3, 4).empty());
  CHECK(reuse_windows(3, 3) == std::vector<uint32_t>{0});
}

TEST_CASE("reuse bounds cover the width overflow and the pool capacity") {
  const auto b1 = reuse_bounds(3, 10, std::optional<uint32_t>{12}, 2);
  CHECK(b1.k_min == 1);
  CHECK(b1.k_max == 2);

  const auto b2 = reuse_bounds(3, 10, std::nullopt, 5);
  CHECK(b2.k_min == 0);
  CHECK(b2.k_max == 3);

  const auto b3 = reuse_bounds(0, 10, std::optional<uint32_t>{10}, 5);
  CHECK(b3.k_min == 0);
  CHECK(b3.k_max == 0);

  // Needing more fresh qubits than the budget and pool allow is a dead end.
  const auto b4 = reuse_bounds(5, 10, std::optional<uint32_t>{12}, 1);
  CHECK(b4.k_min == 3);
  CHECK(b4.k_max == 1);
}

TEST_CASE("take and put_back restore the pool exactly") {
  std::mt19937_64 rng(99);
  QubitPool p;
  for (uint32_t q = 0; q < 12; ++q) p.insert({q, rng() % 100, q});
  const auto snapshot = p.entries();

  for (int round = 0; round < 200; ++round) {
    const size_t k = rng() % (p.size() + 1);
    const size_t begin = k == p.size() ? 0 : rng() % (p.size() - k + 1);
    const auto taken = p.take(begin, k);
    CHECK(p.size() == snapshot.size() - k);
    p.put_back(taken);
    CHECK(p.entries() == snapshot);
  }

  p.insert({50, 33, 7});
  p.erase_qubit(50);
  CHECK(p.entries() == snapshot);
}

TEST_CASE("window-restricted reuse reaches the full-subset optimum") {
  std::mt19937_64 rng(2024);
  const auto ceiling_of = [](const std::vector<PoolEntry>& s) {
    uint64_t c = 0;
    for (const PoolEntry& e : s) c = std::max(c, e.release_depth);
    return c;
  };

  for (int round = 0; round < 200; ++round) {
    const size_t n = 1 + rng() % 8;
    std::vector<uint64_t> depths(n);
    for (auto& d : depths) d = rng() % 1000;
    const uint32_t ka = static_cast<uint32_t>(rng() % (n + 1));
    const uint32_t kb = static_cast<uint32_t>(rng() % (n - ka + 1));
    const uint64_t dep_a = rng() % 500, dur_a = 1 + rng() % 200;
    const uint64_t dep_b = rng() % 500, dur_b = 1 + rng() % 200;

    // Full enumeration over disjoint subset pairs.
    uint64_t best_span = UINT64_MAX, best_sum = UINT64_MAX;
    for (uint32_t ma = 0; ma < (1u << n); ++ma) {
      if (static_cast<uint32_t>(__builtin_popcount(ma)) != ka) continue;
      for (uint32_t mb = 0; mb < (1u << n); ++mb) {
        if ((ma & mb) || static_cast<uint32_t>(__builtin_popcount(mb)) != kb) continue;
        uint64_t ca = 0, cb = 0;
        for (size_t i = 0; i < n; ++i) {
          if (ma & (1u << i)) ca = std::max(ca, depths[i]);
          if (mb & (1u << i)) cb = std::max(cb, depths[i]);
        }
        const uint64_t ea = std::max(dep_a, ca) + dur_a;
        const uint64_t eb = std::max(dep_b, cb) + dur_b;
        best_span = std::min(best_span, std::max(ea, eb));
        best_sum = std::min(best_sum, ea + eb);
      }
    }

    // Window-restricted enumeration in decision order: first consumer picks
    // a window, the second picks a window of what is left.
    uint64_t win_span = UINT64_MAX, win_sum = UINT64_MAX;
    QubitPool pool = pool_of(depths);
    for (uint32_t ba : reuse_windows(pool.size(), ka)) {
      const auto ta = pool.take(ba, ka);
      for (uint32_t bb : reuse_windows(pool.size(), kb)) {
        const auto tb = pool.take(bb, kb);
        const uint64_t ea = std::max(dep_a, ceiling_of(ta)) + dur_a;
        const uint64_t eb = std::max(dep_b, ceiling_of(tb)) + dur_b;
        win_span = std::min(win_span, std::max(ea, eb));
        win_sum = std::min(win_sum, ea + eb);
        pool.put_back(tb);
      }
      pool.put_back(ta);
    }

    CAPTURE(round);
    CHECK(win_span == best_span);
    CHECK(win_sum == best_sum);
  }
}
