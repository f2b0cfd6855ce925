#ifndef QSYNTH_STDLIB_HPP
#define QSYNTH_STDLIB_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "qsynth/circuit.hpp"

namespace qsynth {

// Parametric library function instances. Mcx(0)=X, Mcx(1)=CX, Mch(0)=H,
// Mcrz(0)=RZ, Mcp(1)=CPhase; higher control counts are the controlled forms.
enum class LibFamily : uint8_t { Mcx, AddConst, Mch, Mcrz, Mcp };

struct LibFn {
  LibFamily family = LibFamily::Mcx;
  uint32_t n_ctrl = 0;
  uint32_t width = 0;     // AddConst: target register width
  uint64_t constant = 0;  // AddConst: addend, reduced mod 2^width
  double angle = 0.0;     // Mcrz / Mcp

  auto operator<=>(const LibFn&) const = default;
  std::string name() const;
  // Functional qubits: controls first, then target (bit 0 first for AddConst).
  uint32_t operand_count() const;
};

LibFn mcx_fn(uint32_t n_ctrl);
LibFn add_const_fn(uint32_t width, int64_t constant, uint32_t n_ctrl = 0);
LibFn mch_fn(uint32_t n_ctrl = 0);
LibFn mcrz_fn(double angle, uint32_t n_ctrl = 0);
LibFn mcp_fn(double angle, uint32_t n_ctrl);

// Same function with inverse action (adders negate the constant, rotations
// the angle; the rest are self-inverse).
LibFn inverse_fn(const LibFn& fn);

struct ImplVariant {
  std::string id;
  uint32_t aux = 0;
};

// Trade-off curve per function. Mcx n>=3 exposes zero-aux / split / chain;
// AddConst exposes qft / ripple; everything else has one implementation.
const std::vector<ImplVariant>& variants_of(const LibFn& fn);

// Deterministic circuit for one variant on the given physical qubits.
Circuit generate(const LibFn& fn, uint32_t variant, const std::vector<uint32_t>& operands,
                 const std::vector<uint32_t>& aux);

struct ResourceProfile {
  uint32_t aux = 0;
  uint64_t depth = 0;
  GateCounts counts;
};

// Generate-and-count on fresh qubit ids, cached per (fn, variant).
const ResourceProfile& resource_profile(const LibFn& fn, uint32_t variant);

// CSV table (one row per variant) for the given functions.
std::string profiles_csv(const std::vector<LibFn>& fns);

// Internal building blocks, declared here so tests can pin their contracts
// (exact action for every ancilla value, relative-phase pairing).
namespace detail {
void emit_cp(Circuit& c, uint32_t a, uint32_t b, double theta);
void emit_toffoli(Circuit& c, uint32_t a, uint32_t b, uint32_t t);
void emit_margolus(Circuit& c, uint32_t a, uint32_t b, uint32_t t, bool inverse);
void emit_mcx_dirty(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t,
                    const std::vector<uint32_t>& dirty);
void emit_mcx_1dirty(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, uint32_t d);
}  // namespace detail

}  // namespace qsynth

#endif
