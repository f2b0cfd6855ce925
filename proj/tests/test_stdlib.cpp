#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qsynth/circuit.hpp"
#include "qsynth/simulator.hpp"
#include "qsynth/stdlib.hpp"

using namespace qsynth;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix perm_oracle(uint32_t nq, const std::function<uint64_t(uint64_t)>& f) {
  Matrix m(uint64_t{1} << nq);
  for (uint64_t j = 0; j < m.dim; ++j) m.at(f(j), j) = 1.0;
  return m;
}

// Operand order is controls first, so control bits are the low bits of the
// functional index and the target is bit n_ctrl.
Matrix mcx_oracle(uint32_t n_ctrl) {
  const uint64_t mask = (uint64_t{1} << n_ctrl) - 1;
  return perm_oracle(n_ctrl + 1, [=](uint64_t j) {
    return (j & mask) == mask ? j ^ (uint64_t{1} << n_ctrl) : j;
  });
}

Matrix add_oracle(uint32_t n_ctrl, uint32_t w, uint64_t c) {
  const uint64_t cmask = (uint64_t{1} << n_ctrl) - 1;
  const uint64_t xmask = (uint64_t{1} << w) - 1;
  return perm_oracle(n_ctrl + w, [=](uint64_t j) {
    if ((j & cmask) != cmask) return j;
    const uint64_t x = (j >> n_ctrl) & xmask;
    const uint64_t y = (x + c) & xmask;
    return (j & cmask) | (y << n_ctrl);
  });
}

// Controlled single-qubit unitary; controls on the low bits, target bit on
// n_ctrl, u in column-major order {u00, u10, u01, u11}.
Matrix ctrl1q_oracle(uint32_t n_ctrl, const std::array<cplx, 4>& u) {
  const uint32_t nq = n_ctrl + 1;
  const uint64_t mask = (uint64_t{1} << n_ctrl) - 1;
  Matrix m(uint64_t{1} << nq);
  for (uint64_t j = 0; j < m.dim; ++j) {
    if ((j & mask) != mask) {
      m.at(j, j) = 1.0;
      continue;
    }
    const uint64_t tbit = uint64_t{1} << n_ctrl;
    const uint64_t b = (j & tbit) ? 1 : 0;
    m.at(j & ~tbit, j) = u[b * 2];
    m.at(j | tbit, j) = u[b * 2 + 1];
  }
  return m;
}

Matrix full_mcx_oracle(uint32_t total, const std::vector<uint32_t>& ctrls, uint32_t t) {
  uint64_t cmask = 0;
  for (uint32_t q : ctrls) cmask |= uint64_t{1} << q;
  return perm_oracle(total, [=](uint64_t j) {
    return (j & cmask) == cmask ? j ^ (uint64_t{1} << t) : j;
  });
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.dim == b.dim);
  double d = 0;
  for (size_t i = 0; i < a.a.size(); ++i) d = std::max(d, std::abs(a.a[i] - b.a[i]));
  return d;
}

void check_functional(const LibFn& fn, uint32_t variant, const Matrix& oracle) {
  const auto& vs = variants_of(fn);
  std::vector<uint32_t> operands(fn.operand_count());
  for (uint32_t i = 0; i < operands.size(); ++i) operands[i] = i;
  std::vector<uint32_t> aux(vs.at(variant).aux);
  for (uint32_t i = 0; i < aux.size(); ++i) aux[i] = fn.operand_count() + i;
  const Circuit c = generate(fn, variant, operands, aux);
  const uint32_t total = fn.operand_count() + vs[variant].aux;
  const FunctionalBlock fb = functional_block(c, total, operands);
  CAPTURE(fn.name());
  CAPTURE(vs[variant].id);
  CHECK(fb.leak < 1e-9);
  CHECK(equal_up_to_phase(fb.op, oracle, 1e-9));
}

uint64_t toffoli_perm(uint64_t j) { return (j & 3) == 3 ? j ^ 4 : j; }

}  // namespace

TEST_CASE("controlled phase primitive matches its matrix") {
  const double theta = 0.9371;
  Circuit c;
  detail::emit_cp(c, 0, 1, theta);
  const Matrix u = unitary_of(c, 2);
  Matrix want = Matrix::identity(4);
  want.at(3, 3) = std::exp(cplx(0, theta));
  CHECK(equal_up_to_phase(u, want, 1e-12));
}

TEST_CASE("toffoli network is an exact doubly-controlled X") {
  Circuit c;
  detail::emit_toffoli(c, 0, 1, 2);
  GateCounts cx_only;
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::CX) cx_only.cx++;
  CHECK(cx_only.cx == 6);
  const Matrix u = unitary_of(c, 3);
  CHECK(equal_up_to_phase(u, perm_oracle(3, toffoli_perm), 1e-12));
}

TEST_CASE("margolus is a relative-phase toffoli and self-inverse") {
  Circuit c;
  detail::emit_margolus(c, 0, 1, 2, false);
  const Matrix u = unitary_of(c, 3);
  for (uint64_t col = 0; col < 8; ++col) {
    uint64_t hits = 0;
    for (uint64_t row = 0; row < 8; ++row) {
      const double mag = std::abs(u.at(row, col));
      if (mag < 1e-9) continue;
      ++hits;
      CHECK(row == toffoli_perm(col));
      CHECK(mag == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(hits == 1);
  }
  detail::emit_margolus(c, 0, 1, 2, true);
  const Matrix round_trip = unitary_of(c, 3);
  CHECK(max_abs_diff(round_trip, Matrix::identity(8)) < 1e-9);
}

TEST_CASE("dirty-borrow mcx is exact for every ancilla value") {
  for (uint32_t k = 3; k <= 5; ++k) {
    std::vector<uint32_t> ctrls(k);
    for (uint32_t i = 0; i < k; ++i) ctrls[i] = i;
    const uint32_t t = k;
    std::vector<uint32_t> dirty(k - 2);
    for (uint32_t i = 0; i < k - 2; ++i) dirty[i] = k + 1 + i;
    const uint32_t total = 2 * k - 1;
    Circuit c;
    detail::emit_mcx_dirty(c, ctrls, t, dirty);
    CAPTURE(k);
    CHECK(equal_up_to_phase(unitary_of(c, total), full_mcx_oracle(total, ctrls, t), 1e-9));
  }
}

TEST_CASE("one-dirty mcx is exact for every borrowed value") {
  for (uint32_t k = 3; k <= 6; ++k) {
    std::vector<uint32_t> ctrls(k);
    for (uint32_t i = 0; i < k; ++i) ctrls[i] = i;
    const uint32_t t = k;
    const uint32_t d = k + 1;
    Circuit c;
    detail::emit_mcx_1dirty(c, ctrls, t, d);
    CAPTURE(k);
    CHECK(equal_up_to_phase(unitary_of(c, k + 2), full_mcx_oracle(k + 2, ctrls, t), 1e-9));
  }
}

TEST_CASE("mcx variants act as a multi-controlled X") {
  for (uint32_t n = 0; n <= 6; ++n) {
    const LibFn fn = mcx_fn(n);
    const Matrix oracle = mcx_oracle(n);
    for (uint32_t v = 0; v < variants_of(fn).size(); ++v) check_functional(fn, v, oracle);
  }
}

TEST_CASE("mcx variant menu and trade-off are pinned") {
  CHECK(variants_of(mcx_fn(0)).size() == 1);
  CHECK(variants_of(mcx_fn(2)).size() == 1);
  {
    const auto& vs = variants_of(mcx_fn(3));
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].id == "zero_aux");
    CHECK(vs[1].id == "chain");
  }
  for (uint32_t n = 4; n <= 8; ++n) {
    const auto& vs = variants_of(mcx_fn(n));
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].id == "zero_aux");
    CHECK(vs[0].aux == 0);
    CHECK(vs[1].id == "split");
    CHECK(vs[1].aux == 1);
    CHECK(vs[2].id == "chain");
    CHECK(vs[2].aux == n - 2);
    const auto& zero = resource_profile(mcx_fn(n), 0);
    const auto& split = resource_profile(mcx_fn(n), 1);
    const auto& chain = resource_profile(mcx_fn(n), 2);
    CAPTURE(n);
    CHECK(zero.counts.cx > split.counts.cx);
    CHECK(split.counts.cx > chain.counts.cx);
  }
  CHECK(resource_profile(mcx_fn(0), 0).counts.cx == 0);
  CHECK(resource_profile(mcx_fn(1), 0).counts.cx == 1);
  CHECK(resource_profile(mcx_fn(2), 0).counts.cx == 6);
  for (uint32_t n = 3; n <= 8; ++n) {
    const auto& vs = variants_of(mcx_fn(n));
    CHECK(resource_profile(mcx_fn(n), uint32_t(vs.size() - 1)).counts.cx == 6 * n - 6);
  }
  // Zero-aux cost grows quadratically; lower-order terms still decay at
  // small sizes, so pin the doubling ratio once they are past their peak.
  const double r = double(resource_profile(mcx_fn(32), 0).counts.cx) /
                   double(resource_profile(mcx_fn(16), 0).counts.cx);
  CHECK(r > 3.0);
  CHECK(r < 6.0);
}

TEST_CASE("constant adders match modular addition") {
  for (uint32_t w = 1; w <= 3; ++w) {
    for (uint64_t c = 0; c < (uint64_t{1} << w); ++c) {
      for (uint32_t nc = 0; nc <= 1; ++nc) {
        const LibFn fn = add_const_fn(w, int64_t(c), nc);
        const Matrix oracle = add_oracle(nc, w, c);
        for (uint32_t v = 0; v < variants_of(fn).size(); ++v) check_functional(fn, v, oracle);
      }
    }
  }
  for (uint32_t nc : {0u, 2u}) {
    const LibFn fn = add_const_fn(4, 11, nc);
    const Matrix oracle = add_oracle(nc, 4, 11);
    for (uint32_t v = 0; v < variants_of(fn).size(); ++v) check_functional(fn, v, oracle);
  }
}

TEST_CASE("adder profiles: ripple is linear, qft quadratic") {
  for (uint32_t w = 2; w <= 6; ++w) {
    const LibFn fn = add_const_fn(w, 13 % (int64_t{1} << w), 0);
    const auto& vs = variants_of(fn);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].id == "qft");
    CHECK(vs[0].aux == 0);
    CHECK(vs[1].id == "ripple");
    CHECK(vs[1].aux == w + 1);
    CHECK(resource_profile(fn, 0).counts.cx == uint64_t{2} * w * (w - 1));
    CHECK(resource_profile(fn, 1).counts.cx == uint64_t{7} * w);
  }
  const LibFn w5 = add_const_fn(5, 13, 0);
  CHECK(resource_profile(w5, 1).counts.cx == 35);
  CHECK(resource_profile(w5, 0).counts.cx == 40);
  CHECK(resource_profile(w5, 1).counts.cx < resource_profile(w5, 0).counts.cx);
  const LibFn w3 = add_const_fn(3, 5, 0);
  CHECK(resource_profile(w3, 0).counts.cx < resource_profile(w3, 1).counts.cx);
}

TEST_CASE("controlled gadgets match their matrices") {
  const double theta = 1.1173;
  const cplx i01(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  const std::array<cplx, 4> h_mat{s, s, s, -s};
  const std::array<cplx, 4> rz_mat{std::exp(-i01 * theta / 2.0), 0, 0, std::exp(i01 * theta / 2.0)};
  const std::array<cplx, 4> p_mat{1, 0, 0, std::exp(i01 * theta)};
  for (uint32_t n = 0; n <= 3; ++n) {
    check_functional(mch_fn(n), 0, ctrl1q_oracle(n, h_mat));
    check_functional(mcrz_fn(theta, n), 0, ctrl1q_oracle(n, rz_mat));
    if (n >= 1) check_functional(mcp_fn(theta, n), 0, ctrl1q_oracle(n, p_mat));
  }
}

TEST_CASE("inverse functions undo the forward action") {
  struct Case {
    LibFn fn;
    uint32_t variant;
  };
  const std::vector<Case> cases = {
      {add_const_fn(3, 5, 0), 0}, {add_const_fn(3, 5, 1), 1},   {mcrz_fn(0.71, 2), 0},
      {mcp_fn(1.3, 2), 0},        {mch_fn(1), 0},               {mcx_fn(3), 0},
      {mcx_fn(4), 1},
  };
  for (const auto& [fn, v] : cases) {
    const LibFn inv = inverse_fn(fn);
    const auto& vs = variants_of(fn);
    std::vector<uint32_t> operands(fn.operand_count());
    for (uint32_t i = 0; i < operands.size(); ++i) operands[i] = i;
    std::vector<uint32_t> aux(vs.at(v).aux);
    for (uint32_t i = 0; i < aux.size(); ++i) aux[i] = fn.operand_count() + i;
    Circuit both = generate(fn, v, operands, aux);
    both.append(generate(inv, v, operands, aux));
    const uint32_t total = fn.operand_count() + vs[v].aux;
    // Clean-aux variants only promise their action from aux = 0, so compare
    // the functional block rather than the full-space unitary.
    const FunctionalBlock fb = functional_block(both, total, operands);
    CAPTURE(fn.name());
    CHECK(fb.leak < 1e-9);
    CHECK(equal_up_to_phase(fb.op, Matrix::identity(fb.op.dim), 1e-9));
  }
}

TEST_CASE("profiles equal fresh measurements and generation is deterministic") {
  const std::vector<std::pair<LibFn, uint32_t>> cases = {
      {mcx_fn(5), 0}, {mcx_fn(5), 1}, {mcx_fn(5), 2}, {add_const_fn(4, 9, 1), 0},
      {add_const_fn(4, 9, 1), 1},     {mcrz_fn(0.5, 3), 0},
  };
  for (const auto& [fn, v] : cases) {
    const auto& p = resource_profile(fn, v);
    std::vector<uint32_t> operands(fn.operand_count());
    for (uint32_t i = 0; i < operands.size(); ++i) operands[i] = i;
    std::vector<uint32_t> aux(variants_of(fn)[v].aux);
    for (uint32_t i = 0; i < aux.size(); ++i) aux[i] = fn.operand_count() + i;
    const Circuit a = generate(fn, v, operands, aux);
    const Circuit b = generate(fn, v, operands, aux);
    CHECK(a.gates == b.gates);
    const Metrics m = measure(a);
    CHECK(p.depth == m.depth);
    CHECK(p.counts == m.counts);
    CHECK(p.aux == variants_of(fn)[v].aux);
  }
}

TEST_CASE("csv table lists one row per variant") {
  const std::string csv = profiles_csv({mcx_fn(4), add_const_fn(3, 2, 0)});
  CHECK(csv.find("function,variant,aux,depth,cx,single") == 0);
  CHECK(csv.find("mcx(4),zero_aux,0,") != std::string::npos);
  CHECK(csv.find("mcx(4),split,1,") != std::string::npos);
  CHECK(csv.find("mcx(4),chain,2,") != std::string::npos);
  CHECK(csv.find("add_const(w=3,c=2,ctrl=0),qft,0,") != std::string::npos);
  CHECK(csv.find("add_const(w=3,c=2,ctrl=0),ripple,4,") != std::string::npos);
}

TEST_CASE("argument validation") {
  CHECK_THROWS(add_const_fn(0, 1, 0));
  CHECK_THROWS(mcp_fn(0.5, 0));
  CHECK_THROWS(generate(mcx_fn(3), 7, {0, 1, 2, 3}, {}));
  CHECK_THROWS(generate(mcx_fn(3), 0, {0, 1}, {}));
  CHECK_THROWS(generate(mcx_fn(3), 1, {0, 1, 2, 3}, {}));
  CHECK(inverse_fn(add_const_fn(3, 5, 0)).constant == 3);
  CHECK(inverse_fn(mcrz_fn(0.5, 1)).angle == -0.5);
  CHECK(inverse_fn(mcx_fn(2)) == mcx_fn(2));
}
