#ifndef QSYNTH_BENCHMARKS_HPP
#define QSYNTH_BENCHMARKS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsynth/domains.hpp"
#include "qsynth/model.hpp"
#include "qsynth/simulator.hpp"
#include "qsynth/solver.hpp"

namespace qsynth {

// Coined walk step on a ring of 2^n positions: Hadamard on the coin, then
// the coin conditions an increment (coin 1) or a decrement (coin 0) of the
// position register, built from a multi-control cascade. Coin is qubit 0,
// position bits follow.
Model build_walk_model(uint32_t n);

// Non-cyclic hopping operator on 2^n points as a unitary block: a packed
// register (n data bits plus one overflow bit) is shifted by +-1 under a
// Hadamard-conjugated selector, then a flag flips for the packed zero state
// (an inversion about zero). Data block of the result: 0.5 on both
// off-diagonals, first row zeroed. Layout: selector 0, packed 1..n+1,
// flag n+2; data bits are 1..n.
Model build_block_encoding_model(uint32_t n);

// Alternating phased iterates over the hopping encoding: a projector
// controlled phase gadget per phase, the encoding (odd steps) or its
// inverse (even steps) between them; degree = phases.size() - 1. Same
// layout as the encoding plus the gadget target as the last qubit.
Model build_qsvt_model(uint32_t n, const std::vector<double>& phases);

// Dense oracles built from index arithmetic only.
Matrix walk_step_matrix(uint32_t n);
Matrix block_encoding_target(uint32_t n);

// Portable phase stream: phi_j = (next() >> 11) * 2^-53 * 2*pi.
std::vector<double> random_phases(uint32_t count, uint64_t seed);

// Classical recursion for the phased-iterate product: start from the
// phi_0 gadget, then alternately multiply the encoding unitary (odd step)
// or its adjoint (even step) and the next gadget; return the sub-matrix on
// the rows and columns whose qubits outside `data` are all zero.
Matrix qsvt_block_recursion(const Matrix& u_a, uint32_t total_qubits,
                            const std::vector<uint32_t>& data, const std::vector<double>& phases);

struct BenchRow {
  std::string family;
  uint32_t n = 0;
  std::optional<uint32_t> max_width;
  Objective objective = Objective::None;
  bool feasible = false;
  uint32_t width = 0;
  uint64_t depth = 0;
  uint64_t cx = 0;
  double gen_time_ms = 0.0;
  bool optimal = false;
  bool timeout = false;
};

const char* objective_name(Objective obj);

// Synthesize one benchmark instance and record its headline metrics.
BenchRow run_case(const std::string& family, const Model& m, uint32_t n, const Constraints& cons,
                  Objective obj, const SolveOptions& opts);

// family,N,max_width,objective,width,depth,cx,gen_time_ms,optimal,timeout
std::string bench_csv(const std::vector<BenchRow>& rows);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace qsynth

#endif
