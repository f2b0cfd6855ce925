#include "qsynth/stdlib.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qsynth {

namespace detail {

constexpr double kPi = std::numbers::pi;

uint64_t mod_pow2(int64_t v, uint32_t width) {
  if (width >= 64) return static_cast<uint64_t>(v);
  const uint64_t mask = (uint64_t{1} << width) - 1;
  return static_cast<uint64_t>(v) & mask;
}

// ry(t) = rz(pi/2) . h . rz(t) . h . rz(-pi/2), exact (conjugation cancels
// the rz global phases).
void emit_ry(Circuit& c, uint32_t q, double theta) {
  c.push(gate_rz(q, -kPi / 2));
  c.push(gate_h(q));
  c.push(gate_rz(q, theta));
  c.push(gate_h(q));
  c.push(gate_rz(q, kPi / 2));
}

// Controlled phase diag(1,1,1,e^{i t}), uniform global factor e^{-i t/4}.
void emit_cp(Circuit& c, uint32_t a, uint32_t b, double theta) {
  c.push(gate_rz(a, theta / 2));
  c.push(gate_rz(b, theta / 2));
  c.push(gate_cx(a, b));
  c.push(gate_rz(b, -theta / 2));
  c.push(gate_cx(a, b));
}

// Controlled X^alpha = (I ⊗ H) CP(alpha*pi) (I ⊗ H), up to a global phase.
void emit_cv(Circuit& c, uint32_t ctrl, uint32_t t, double alpha) {
  c.push(gate_h(t));
  emit_cp(c, ctrl, t, alpha * kPi);
  c.push(gate_h(t));
}

// Exact Toffoli over {h,x,rz,cx}: 6 CX, global phase only.
void emit_toffoli(Circuit& c, uint32_t a, uint32_t b, uint32_t t) {
  c.push(gate_h(t));
  c.push(gate_cx(b, t));
  c.push(gate_rz(t, -kPi / 4));
  c.push(gate_cx(a, t));
  c.push(gate_rz(t, kPi / 4));
  c.push(gate_cx(b, t));
  c.push(gate_rz(t, -kPi / 4));
  c.push(gate_cx(a, t));
  c.push(gate_rz(t, kPi / 4));
  c.push(gate_rz(b, kPi / 4));
  c.push(gate_h(t));
  c.push(gate_cx(a, b));
  c.push(gate_rz(a, kPi / 4));
  c.push(gate_rz(b, -kPi / 4));
  c.push(gate_cx(a, b));
}

// Relative-phase Toffoli (3 CX). Equals Toffoli times a diagonal sign, so it
// is only used in compute/uncompute pairs whose operand values match. The
// network is its own reversed inverse, hence `inverse` emits the same gates.
void emit_margolus(Circuit& c, uint32_t a, uint32_t b, uint32_t t, bool inverse) {
  (void)inverse;
  c.push(gate_h(t));
  c.push(gate_rz(t, kPi / 4));
  c.push(gate_cx(b, t));
  c.push(gate_rz(t, -kPi / 4));
  c.push(gate_cx(a, t));
  c.push(gate_rz(t, kPi / 4));
  c.push(gate_cx(b, t));
  c.push(gate_rz(t, -kPi / 4));
  c.push(gate_h(t));
}

// Multi-controlled X with |ctrls|-2 borrowed qubits, all restored for every
// input value. Double ladder of exact Toffolis: 4k-8 of them for k controls.
void emit_mcx_dirty(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t,
                    const std::vector<uint32_t>& dirty) {
  const size_t k = ctrls.size();
  if (k == 0) {
    c.push(gate_x(t));
    return;
  }
  if (k == 1) {
    c.push(gate_cx(ctrls[0], t));
    return;
  }
  if (k == 2) {
    emit_toffoli(c, ctrls[0], ctrls[1], t);
    return;
  }
  assert(dirty.size() >= k - 2);
  auto half = [&](void) {
    emit_toffoli(c, ctrls[k - 1], dirty[k - 3], t);
    for (size_t i = k - 3; i >= 1; --i) emit_toffoli(c, ctrls[i + 1], dirty[i - 1], dirty[i]);
    emit_toffoli(c, ctrls[0], ctrls[1], dirty[0]);
    for (size_t i = 1; i <= k - 3; ++i) emit_toffoli(c, ctrls[i + 1], dirty[i - 1], dirty[i]);
  };
  half();
  half();
}

// Multi-controlled X with one borrowed qubit, restored for every input.
// Split the controls in half and alternate the two halves twice.
void emit_mcx_1dirty(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, uint32_t d) {
  const size_t k = ctrls.size();
  if (k <= 2) {
    emit_mcx_dirty(c, ctrls, t, {});
    return;
  }
  const size_t m = (k + 1) / 2;
  const std::vector<uint32_t> c1(ctrls.begin(), ctrls.begin() + m);
  const std::vector<uint32_t> c2(ctrls.begin() + m, ctrls.end());
  std::vector<uint32_t> c2d = c2;
  c2d.push_back(d);
  std::vector<uint32_t> dirty_a = c2;  // borrowed by the first half
  dirty_a.push_back(t);
  const std::vector<uint32_t>& dirty_b = c1;  // borrowed by the second half
  emit_mcx_dirty(c, c2d, t, dirty_b);
  emit_mcx_dirty(c, c1, d, dirty_a);
  emit_mcx_dirty(c, c2d, t, dirty_b);
  emit_mcx_dirty(c, c1, d, dirty_a);
}

// Multi-controlled X^alpha without auxiliary qubits: peel one control at a
// time with controlled roots, using the target as the borrowed qubit.
void emit_mcv(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, double alpha) {
  const size_t j = ctrls.size();
  assert(j >= 1);
  if (j == 1) {
    emit_cv(c, ctrls[0], t, alpha);
    return;
  }
  const std::vector<uint32_t> rest(ctrls.begin(), ctrls.end() - 1);
  const uint32_t last = ctrls.back();
  emit_cv(c, last, t, alpha / 2);
  emit_mcx_1dirty(c, rest, last, t);
  emit_cv(c, last, t, -alpha / 2);
  emit_mcx_1dirty(c, rest, last, t);
  emit_mcv(c, rest, t, alpha / 2);
}

void emit_mcx_noaux(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t) {
  if (ctrls.size() <= 2) {
    emit_mcx_dirty(c, ctrls, t, {});
    return;
  }
  emit_mcv(c, ctrls, t, 1.0);
}

// Chain of relative-phase Toffolis into k-2 clean aux, one exact Toffoli at
// the top, then the uncompute ladder. 6k-6 CX.
void emit_mcx_chain(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t,
                    const std::vector<uint32_t>& aux) {
  const size_t k = ctrls.size();
  assert(k >= 3 && aux.size() >= k - 2);
  emit_margolus(c, ctrls[0], ctrls[1], aux[0], false);
  for (size_t i = 1; i + 2 <= k - 1; ++i) emit_margolus(c, ctrls[i + 1], aux[i - 1], aux[i], false);
  emit_toffoli(c, ctrls[k - 1], aux[k - 3], t);
  for (size_t i = k - 3; i >= 1; --i) emit_margolus(c, ctrls[i + 1], aux[i - 1], aux[i], true);
  emit_margolus(c, ctrls[0], ctrls[1], aux[0], true);
}

// One clean aux: compress the first half into it, fire the second half, and
// uncompute. Both halves borrow from the other side.
void emit_mcx_split(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, uint32_t a) {
  const size_t k = ctrls.size();
  assert(k >= 4);
  const size_t m = (k + 1) / 2;
  const std::vector<uint32_t> c1(ctrls.begin(), ctrls.begin() + m);
  const std::vector<uint32_t> c2(ctrls.begin() + m, ctrls.end());
  std::vector<uint32_t> c2a = c2;
  c2a.push_back(a);
  std::vector<uint32_t> dirty1 = c2;
  dirty1.push_back(t);
  emit_mcx_dirty(c, c1, a, dirty1);
  emit_mcx_dirty(c, c2a, t, c1);
  emit_mcx_dirty(c, c1, a, dirty1);
}

void emit_mcx_variant(Circuit& c, const std::string& id, const std::vector<uint32_t>& ctrls,
                      uint32_t t, const std::vector<uint32_t>& aux) {
  if (id == "direct") {
    emit_mcx_dirty(c, ctrls, t, {});
  } else if (id == "zero_aux") {
    emit_mcx_noaux(c, ctrls, t);
  } else if (id == "split") {
    emit_mcx_split(c, ctrls, t, aux.at(0));
  } else if (id == "chain") {
    emit_mcx_chain(c, ctrls, t, aux);
  } else {
    throw std::invalid_argument("unknown mcx variant: " + id);
  }
}

// Multi-controlled phase diag(..., e^{i t}) on the all-ones subspace. Peel
// one qubit per level: the phase condition on the peeled control is folded
// into half-angle phases around a multi-controlled flip of that control.
void emit_mcp(Circuit& c, std::vector<uint32_t> qs, double theta) {
  assert(qs.size() >= 2);
  if (qs.size() == 2) {
    emit_cp(c, qs[0], qs[1], theta);
    return;
  }
  const uint32_t t = qs.back();
  const uint32_t last = qs[qs.size() - 2];
  std::vector<uint32_t> rest(qs.begin(), qs.end() - 2);
  emit_cp(c, last, t, theta / 2);
  emit_mcx_noaux(c, rest, last);
  emit_cp(c, last, t, -theta / 2);
  emit_mcx_noaux(c, rest, last);
  rest.push_back(t);
  emit_mcp(c, rest, theta / 2);
}

void emit_mcrz(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, double theta) {
  if (ctrls.empty()) {
    c.push(gate_rz(t, theta));
    return;
  }
  c.push(gate_rz(t, theta / 2));
  emit_mcx_noaux(c, ctrls, t);
  c.push(gate_rz(t, -theta / 2));
  emit_mcx_noaux(c, ctrls, t);
}

void emit_mcry(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t, double theta) {
  emit_ry(c, t, theta / 2);
  emit_mcx_noaux(c, ctrls, t);
  emit_ry(c, t, -theta / 2);
  emit_mcx_noaux(c, ctrls, t);
}

// h = ry(pi/2) z exactly, so apply the controlled Z then the controlled RY.
void emit_mch(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t t) {
  if (ctrls.empty()) {
    c.push(gate_h(t));
    return;
  }
  c.push(gate_h(t));
  emit_mcx_noaux(c, ctrls, t);
  c.push(gate_h(t));
  emit_mcry(c, ctrls, t, kPi / 2);
}

// Single-qubit phase: plain rz is fine uncontrolled (global factor only),
// controlled forms must use the exact multi-controlled phase.
void emit_phase(Circuit& c, const std::vector<uint32_t>& ctrls, uint32_t q, double theta) {
  if (ctrls.empty()) {
    c.push(gate_rz(q, theta));
    return;
  }
  std::vector<uint32_t> qs = ctrls;
  qs.push_back(q);
  emit_mcp(c, qs, theta);
}

// In-place |x> -> |x + c mod 2^w> in the Fourier basis: transform, single
// qubit phases (controlled if requested), inverse transform. No aux.
void emit_add_qft(Circuit& c, const std::vector<uint32_t>& ctrls, const std::vector<uint32_t>& x,
                  uint64_t constant) {
  const size_t w = x.size();
  // Forward transform, bit-reversed output convention.
  for (size_t j = w; j-- > 0;) {
    c.push(gate_h(x[j]));
    for (size_t m = 1; m <= j; ++m) emit_cp(c, x[j - m], x[j], kPi / std::pow(2.0, double(m)));
  }
  for (size_t j = 0; j < w; ++j) {
    const double theta = kPi * double(constant) / std::pow(2.0, double(j));
    emit_phase(c, ctrls, x[j], theta);
  }
  // Inverse transform: reversed gate order, negated angles.
  for (size_t j = 0; j < w; ++j) {
    for (size_t m = j; m >= 1; --m) emit_cp(c, x[j - m], x[j], -kPi / std::pow(2.0, double(m)));
    c.push(gate_h(x[j]));
  }
}

// Ripple-carry constant adder. aux = a_0..a_w: a_0 is the zero carry-in and
// a_{i+1} receives carry_{i+1}, all uncomputed on the way down. Carries use
// relative-phase Toffolis whose partners see identical operand values.
void emit_add_ripple(Circuit& c, const std::vector<uint32_t>& ctrls, const std::vector<uint32_t>& x,
                     uint64_t constant, const std::vector<uint32_t>& aux) {
  const size_t w = x.size();
  assert(aux.size() == w + 1);
  auto carry = [&](size_t i, bool inverse) {
    const bool bit = (constant >> i) & 1;
    if (!bit) {
      emit_margolus(c, x[i], aux[i], aux[i + 1], inverse);
      return;
    }
    // carry_{i+1} = x_i OR carry_i, via De Morgan around the Toffoli.
    if (!inverse) {
      c.push(gate_x(x[i]));
      c.push(gate_x(aux[i]));
      emit_margolus(c, x[i], aux[i], aux[i + 1], false);
      c.push(gate_x(x[i]));
      c.push(gate_x(aux[i]));
      c.push(gate_x(aux[i + 1]));
    } else {
      c.push(gate_x(aux[i + 1]));
      c.push(gate_x(aux[i]));
      c.push(gate_x(x[i]));
      emit_margolus(c, x[i], aux[i], aux[i + 1], true);
      c.push(gate_x(aux[i]));
      c.push(gate_x(x[i]));
    }
  };
  for (size_t i = 0; i < w; ++i) carry(i, false);
  for (size_t i = w; i-- > 0;) {
    carry(i, true);
    // Sum bit: x_i ^= c_i ^ carry_i, gated on the controls.
    if ((constant >> i) & 1) {
      if (ctrls.empty())
        c.push(gate_x(x[i]));
      else
        emit_mcx_noaux(c, ctrls, x[i]);
    }
    std::vector<uint32_t> cs = ctrls;
    cs.push_back(aux[i]);
    emit_mcx_noaux(c, cs, x[i]);
  }
}

struct ProfileKey {
  LibFn fn;
  uint32_t variant;
  auto operator<=>(const ProfileKey&) const = default;
};

}  // namespace detail

using namespace detail;

std::string LibFn::name() const {
  std::ostringstream os;
  switch (family) {
    case LibFamily::Mcx:
      os << "mcx(" << n_ctrl << ")";
      break;
    case LibFamily::AddConst:
      os << "add_const(w=" << width << ",c=" << constant << ",ctrl=" << n_ctrl << ")";
      break;
    case LibFamily::Mch:
      os << "mch(" << n_ctrl << ")";
      break;
    case LibFamily::Mcrz:
      os << "mcrz(" << n_ctrl << "," << angle << ")";
      break;
    case LibFamily::Mcp:
      os << "mcp(" << n_ctrl << "," << angle << ")";
      break;
  }
  return os.str();
}

uint32_t LibFn::operand_count() const {
  if (family == LibFamily::AddConst) return n_ctrl + width;
  return n_ctrl + 1;
}

LibFn mcx_fn(uint32_t n_ctrl) { return LibFn{LibFamily::Mcx, n_ctrl, 0, 0, 0.0}; }

LibFn add_const_fn(uint32_t width, int64_t constant, uint32_t n_ctrl) {
  if (width == 0) throw std::invalid_argument("add_const needs width > 0");
  return LibFn{LibFamily::AddConst, n_ctrl, width, mod_pow2(constant, width), 0.0};
}

LibFn mch_fn(uint32_t n_ctrl) { return LibFn{LibFamily::Mch, n_ctrl, 0, 0, 0.0}; }

LibFn mcrz_fn(double angle, uint32_t n_ctrl) { return LibFn{LibFamily::Mcrz, n_ctrl, 0, 0, angle}; }

LibFn mcp_fn(double angle, uint32_t n_ctrl) {
  if (n_ctrl == 0) throw std::invalid_argument("mcp needs at least one control");
  return LibFn{LibFamily::Mcp, n_ctrl, 0, 0, angle};
}

LibFn inverse_fn(const LibFn& fn) {
  LibFn inv = fn;
  switch (fn.family) {
    case LibFamily::Mcx:
    case LibFamily::Mch:
      break;
    case LibFamily::AddConst:
      inv.constant = mod_pow2(-static_cast<int64_t>(fn.constant), fn.width);
      break;
    case LibFamily::Mcrz:
    case LibFamily::Mcp:
      inv.angle = -fn.angle;
      break;
  }
  return inv;
}

const std::vector<ImplVariant>& variants_of(const LibFn& fn) {
  static std::mutex mu;
  static std::map<LibFn, std::vector<ImplVariant>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(fn);
  if (it != cache.end()) return it->second;
  std::vector<ImplVariant> vs;
  switch (fn.family) {
    case LibFamily::Mcx:
      if (fn.n_ctrl <= 2) {
        vs.push_back({"direct", 0});
      } else if (fn.n_ctrl == 3) {
        vs.push_back({"zero_aux", 0});
        vs.push_back({"chain", 1});
      } else {
        vs.push_back({"zero_aux", 0});
        vs.push_back({"split", 1});
        vs.push_back({"chain", fn.n_ctrl - 2});
      }
      break;
    case LibFamily::AddConst:
      vs.push_back({"qft", 0});
      vs.push_back({"ripple", fn.width + 1});
      break;
    case LibFamily::Mch:
    case LibFamily::Mcrz:
    case LibFamily::Mcp:
      vs.push_back({"gadget", 0});
      break;
  }
  return cache.emplace(fn, std::move(vs)).first->second;
}

Circuit generate(const LibFn& fn, uint32_t variant, const std::vector<uint32_t>& operands,
                 const std::vector<uint32_t>& aux) {
  const auto& vs = variants_of(fn);
  if (variant >= vs.size()) throw std::invalid_argument("variant index out of range");
  if (operands.size() != fn.operand_count())
    throw std::invalid_argument("operand count mismatch for " + fn.name());
  if (aux.size() != vs[variant].aux)
    throw std::invalid_argument("aux count mismatch for " + fn.name());
  Circuit c;
  const std::vector<uint32_t> ctrls(operands.begin(), operands.begin() + fn.n_ctrl);
  switch (fn.family) {
    case LibFamily::Mcx:
      emit_mcx_variant(c, vs[variant].id, ctrls, operands.back(), aux);
      break;
    case LibFamily::AddConst: {
      const std::vector<uint32_t> x(operands.begin() + fn.n_ctrl, operands.end());
      if (vs[variant].id == "qft")
        emit_add_qft(c, ctrls, x, fn.constant);
      else
        emit_add_ripple(c, ctrls, x, fn.constant, aux);
      break;
    }
    case LibFamily::Mch:
      emit_mch(c, ctrls, operands.back());
      break;
    case LibFamily::Mcrz:
      emit_mcrz(c, ctrls, operands.back(), fn.angle);
      break;
    case LibFamily::Mcp: {
      std::vector<uint32_t> qs = ctrls;
      qs.push_back(operands.back());
      emit_mcp(c, qs, fn.angle);
      break;
    }
  }
  return c;
}

const ResourceProfile& resource_profile(const LibFn& fn, uint32_t variant) {
  static std::mutex mu;
  static std::map<ProfileKey, ResourceProfile> cache;
  std::lock_guard<std::mutex> lock(mu);
  const ProfileKey key{fn, variant};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const auto& vs = variants_of(fn);
  if (variant >= vs.size()) throw std::invalid_argument("variant index out of range");
  std::vector<uint32_t> operands(fn.operand_count());
  for (uint32_t i = 0; i < operands.size(); ++i) operands[i] = i;
  std::vector<uint32_t> aux(vs[variant].aux);
  for (uint32_t i = 0; i < aux.size(); ++i) aux[i] = fn.operand_count() + i;
  const Circuit c = generate(fn, variant, operands, aux);
  const Metrics m = measure(c);
  ResourceProfile p{vs[variant].aux, m.depth, m.counts};
  return cache.emplace(key, p).first->second;
}

std::string profiles_csv(const std::vector<LibFn>& fns) {
  std::ostringstream os;
  os << "function,variant,aux,depth,cx,single\n";
  for (const auto& fn : fns) {
    const auto& vs = variants_of(fn);
    for (uint32_t v = 0; v < vs.size(); ++v) {
      const auto& p = resource_profile(fn, v);
      os << fn.name() << "," << vs[v].id << "," << p.aux << "," << p.depth << "," << p.counts.cx
         << "," << p.counts.single << "\n";
    }
  }
  return os.str();
}

}  // namespace qsynth
