#include "qsynth/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qsynth/pipeline.hpp"

namespace qsynth {
namespace {

using nlohmann::json;

json jgate(const char* g, std::vector<std::string> ops) {
  json j;
  j["gate"] = g;
  j["operands"] = std::move(ops);
  return j;
}

json jctrl(const std::string& operand, const json& equals, json body) {
  json j;
  j["control"]["operand"] = operand;
  j["control"]["equals"] = equals;
  j["body"] = std::move(body);
  return j;
}

json jvar(const char* name, uint32_t width) {
  json j;
  j["name"] = name;
  j["width"] = width;
  return j;
}

json jparam(const char* name, const char* kind) {
  json j;
  j["name"] = name;
  j["kind"] = kind;
  return j;
}

json add_one(const std::string& reg) {
  json j;
  j["call"] = "add_const";
  j["args"] = json::array({reg});
  j["value"] = 1;
  return j;
}

// H on the selector, selector-conditioned +-1 on the packed register, H
// again, then a flag flip on the packed zero state.
json hopping_body() {
  json body = json::array();
  body.push_back(jgate("H", {"sel"}));
  body.push_back(jctrl("sel", 1, json::array({add_one("p")})));
  json inv;
  inv["invert"] = json::array({add_one("p")});
  body.push_back(jctrl("sel", 0, json::array({std::move(inv)})));
  body.push_back(jgate("H", {"sel"}));
  body.push_back(jctrl("p", 0, json::array({jgate("X", {"flag"})})));
  return body;
}

}  // namespace

Model build_walk_model(uint32_t n) {
  json m;
  m["entry"] = "main";
  m["variables"] = json::array({jvar("coin", 1), jvar("x", n)});

  json my_mcx;
  my_mcx["params"] = json::array({jparam("c", "qubit_array"), jparam("t", "qubit")});
  my_mcx["body"] =
      json::array({jctrl("c", "2**len(c)-1", json::array({jgate("X", {"t"})}))});

  json increment;
  increment["params"] = json::array({jparam("r", "qnum")});
  json rep;
  rep["repeat"]["index"] = "i";
  rep["repeat"]["count"] = "len(r)-1";
  json step;
  step["call"] = "my_mcx";
  step["args"] = json::array({"r[0:len(r)-1-i]", "r[len(r)-1-i]"});
  rep["repeat"]["body"] = json::array({std::move(step)});
  increment["body"] = json::array({std::move(rep), jgate("X", {"r[0]"})});

  json inc_call;
  inc_call["call"] = "increment";
  inc_call["args"] = json::array({"x"});
  json dec_call;
  dec_call["invert"] = json::array({inc_call});

  json main_fn;
  main_fn["params"] = json::array({jparam("coin", "qubit"), jparam("x", "qnum")});
  main_fn["body"] = json::array({jgate("H", {"coin"}),
                                 jctrl("coin", 1, json::array({std::move(inc_call)})),
                                 jctrl("coin", 0, json::array({std::move(dec_call)}))});

  m["functions"]["my_mcx"] = std::move(my_mcx);
  m["functions"]["increment"] = std::move(increment);
  m["functions"]["main"] = std::move(main_fn);
  return parse_model(m.dump());
}

Model build_block_encoding_model(uint32_t n) {
  json m;
  m["entry"] = "main";
  m["variables"] = json::array({jvar("sel", 1), jvar("p", n + 1), jvar("flag", 1)});
  json main_fn;
  main_fn["params"] =
      json::array({jparam("sel", "qubit"), jparam("p", "qnum"), jparam("flag", "qubit")});
  main_fn["body"] = hopping_body();
  m["functions"]["main"] = std::move(main_fn);
  return parse_model(m.dump());
}

Model build_qsvt_model(uint32_t n, const std::vector<double>& phases) {
  json m;
  m["entry"] = "main";
  m["variables"] =
      json::array({jvar("sel", 1), jvar("p", n + 1), jvar("flag", 1), jvar("aux", 1)});

  json be;
  be["params"] =
      json::array({jparam("sel", "qubit"), jparam("p", "qnum"), jparam("flag", "qubit")});
  be["body"] = hopping_body();
  m["functions"]["be"] = std::move(be);

  const std::string del = "p[" + std::to_string(n) + "]";
  const auto flip = [&] {
    return jctrl("sel", 0,
                 json::array({jctrl(del, 0,
                                    json::array({jctrl("flag", 0,
                                                       json::array({jgate("X", {"aux"})}))}))}));
  };
  const auto gadget = [&](double phi) {
    json rz = jgate("RZ", {"aux"});
    rz["angle"] = phi;
    return json::array({flip(), std::move(rz), flip()});
  };

  json body = json::array();
  for (const json& s : gadget(phases.at(0))) body.push_back(s);
  json be_call;
  be_call["call"] = "be";
  be_call["args"] = json::array({"sel", "p", "flag"});
  for (size_t j = 1; j < phases.size(); ++j) {
    if (j % 2 == 1) {
      body.push_back(be_call);
    } else {
      json inv;
      inv["invert"] = json::array({be_call});
      body.push_back(std::move(inv));
    }
    for (const json& s : gadget(phases[j])) body.push_back(s);
  }

  json main_fn;
  main_fn["params"] = json::array({jparam("sel", "qubit"), jparam("p", "qnum"),
                                   jparam("flag", "qubit"), jparam("aux", "qubit")});
  main_fn["body"] = std::move(body);
  m["functions"]["main"] = std::move(main_fn);
  return parse_model(m.dump());
}

Matrix walk_step_matrix(uint32_t n) {
  const uint64_t half = uint64_t{1} << n;
  const uint64_t dim = half << 1;
  Matrix h(dim);
  const double s = 1.0 / std::sqrt(2.0);
  for (uint64_t x = 0; x < half; ++x)
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp)
        h.at((x << 1) | cp, (x << 1) | c) = s * ((c & cp) ? -1.0 : 1.0);
  Matrix sh(dim);
  for (uint64_t x = 0; x < half; ++x) {
    sh.at((((x + 1) & (half - 1)) << 1) | 1, (x << 1) | 1) = 1.0;
    sh.at((((x + half - 1) & (half - 1)) << 1) | 0, (x << 1) | 0) = 1.0;
  }
  return multiply(sh, h);
}

Matrix block_encoding_target(uint32_t n) {
  const uint64_t dim = uint64_t{1} << n;
  Matrix a(dim);
  for (uint64_t x = 0; x < dim; ++x) {
    if (x + 1 < dim) a.at(x + 1, x) = 0.5;
    if (x >= 1) a.at(x - 1, x) = 0.5;
  }
  for (uint64_t c = 0; c < dim; ++c) a.at(0, c) = 0.0;
  return a;
}

std::vector<double> random_phases(uint32_t count, uint64_t seed) {
  std::mt19937_64 mt(seed);
  std::vector<double> phases(count);
  for (double& p : phases)
    p = static_cast<double>(mt() >> 11) * 0x1.0p-53 * 2.0 * 3.14159265358979323846;
  return phases;
}

Matrix qsvt_block_recursion(const Matrix& u_a, uint32_t total_qubits,
                            const std::vector<uint32_t>& data,
                            const std::vector<double>& phases) {
  const uint64_t dim = uint64_t{1} << total_qubits;
  if (u_a.dim != dim) throw SimError("qsvt_block_recursion: dimension mismatch");
  if (phases.empty()) throw SimError("qsvt_block_recursion: need at least one phase");
  uint64_t data_mask = 0;
  for (uint32_t q : data) data_mask |= uint64_t{1} << q;
  const auto gadget = [&](double phi) {
    Matrix g(dim);
    const cplx in = std::exp(cplx(0.0, phi / 2));
    const cplx out = std::exp(cplx(0.0, -phi / 2));
    for (uint64_t i = 0; i < dim; ++i) g.at(i, i) = (i & ~data_mask) == 0 ? in : out;
    return g;
  };
  Matrix m = gadget(phases[0]);
  const Matrix ua_dag = dagger(u_a);
  for (size_t j = 1; j < phases.size(); ++j) {
    m = multiply(j % 2 == 1 ? u_a : ua_dag, m);
    m = multiply(gadget(phases[j]), m);
  }
  const uint32_t nd = static_cast<uint32_t>(data.size());
  const auto spread = [&](uint64_t k) {
    uint64_t full = 0;
    for (uint32_t t = 0; t < nd; ++t)
      if (k >> t & 1) full |= uint64_t{1} << data[t];
    return full;
  };
  Matrix b(uint64_t{1} << nd);
  for (uint64_t r = 0; r < b.dim; ++r)
    for (uint64_t c = 0; c < b.dim; ++c) b.at(r, c) = m.at(spread(r), spread(c));
  return b;
}

const char* objective_name(Objective obj) {
  switch (obj) {
    case Objective::None:
      return "none";
    case Objective::Width:
      return "width";
    case Objective::Depth:
      return "depth";
    case Objective::Cx:
      return "cx";
  }
  return "none";
}

BenchRow run_case(const std::string& family, const Model& m, uint32_t n, const Constraints& cons,
                  Objective obj, const SolveOptions& opts) {
  BenchRow row;
  row.family = family;
  row.n = n;
  row.max_width = cons.max_width;
  row.objective = obj;
  const auto t0 = std::chrono::steady_clock::now();
  const SynthesisReport r = synthesize(m, cons, obj, opts);
  row.gen_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  row.feasible = r.feasible;
  if (r.feasible) {
    row.width = r.accounting.width;
    row.depth = r.metrics.depth;
    row.cx = r.metrics.counts.cx;
  }
  row.optimal = r.optimal;
  row.timeout = !r.stats.exhausted;
  return row;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "family,N,max_width,objective,width,depth,cx,gen_time_ms,optimal,timeout\n";
  for (const BenchRow& r : rows) {
    out << r.family << ',' << r.n << ',';
    if (r.max_width) out << *r.max_width;
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.1f", r.gen_time_ms);
    out << ',' << objective_name(r.objective) << ',' << r.width << ',' << r.depth << ',' << r.cx
        << ',' << ms << ',' << (r.optimal ? 1 : 0) << ',' << (r.timeout ? 1 : 0) << '\n';
  }
  return out.str();
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qsynth
