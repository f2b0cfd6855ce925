#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsynth/benchmarks.hpp"
#include "qsynth/callgraph.hpp"
#include "qsynth/pipeline.hpp"
#include "qsynth/qasm.hpp"
#include "qsynth/stdlib.hpp"

namespace {

using qsynth::Constraints;
using qsynth::Objective;
using qsynth::SolveOptions;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write through a temp file and rename so readers never see partial output.
void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void emit_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    atomic_write(path, content);
}

Objective parse_objective(const std::string& s) {
  if (s == "none") return Objective::None;
  if (s == "width") return Objective::Width;
  if (s == "depth") return Objective::Depth;
  if (s == "cx") return Objective::Cx;
  throw std::runtime_error("unknown objective: " + s);
}

struct CommonOpts {
  std::optional<uint32_t> max_width;
  std::optional<uint64_t> max_depth, max_cx, max_single;
  std::string objective = "none";
  uint64_t seed = 0;
  double timeout_s = 1000.0;
  uint64_t max_decisions = 2'000'000;
  bool no_reducer = false;

  Constraints constraints() const {
    Constraints c;
    c.max_width = max_width;
    c.max_depth = max_depth;
    c.max_cx = max_cx;
    c.max_single = max_single;
    return c;
  }
  SolveOptions solve_options() const {
    SolveOptions o;
    o.seed = seed;
    o.budget.max_wall_ms = timeout_s * 1000.0;
    o.budget.max_decisions = max_decisions;
    o.use_reducer = !no_reducer;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--objective", c.objective, "Minimise none|width|depth|cx")
      ->check(CLI::IsMember({"none", "width", "depth", "cx"}));
  cmd->add_option("--max-width", c.max_width, "Qubit count cap");
  cmd->add_option("--max-depth", c.max_depth, "Schedule depth cap");
  cmd->add_option("--max-cx", c.max_cx, "Two-qubit gate cap");
  cmd->add_option("--max-single", c.max_single, "Single-qubit gate cap");
  cmd->add_option("--seed", c.seed, "Search tie-break seed")->envname("QSYNTH_SEED");
  cmd->add_option("--timeout", c.timeout_s, "Search budget in seconds");
  cmd->add_option("--max-decisions", c.max_decisions, "Search decision budget");
  cmd->add_flag("--no-reducer", c.no_reducer, "Disable interchangeable-sibling chaining");
}

nlohmann::ordered_json metrics_json(const qsynth::Metrics& m) {
  nlohmann::ordered_json j;
  j["width"] = m.width;
  j["depth"] = m.depth;
  j["cx"] = m.counts.cx;
  j["single"] = m.counts.single;
  j["total"] = m.counts.total();
  return j;
}

// Wall-clock figures stay out of the report so equal-seed runs are
// byte-identical.
nlohmann::ordered_json report_json(const qsynth::SynthesisReport& r, const CommonOpts& c) {
  nlohmann::ordered_json j;
  j["feasible"] = r.feasible;
  j["optimal"] = r.optimal;
  j["objective"] = c.objective;
  j["objective_value"] = r.objective_value;
  j["seed"] = c.seed;
  nlohmann::ordered_json cons;
  cons["max_width"] = c.max_width ? nlohmann::ordered_json(*c.max_width) : nullptr;
  cons["max_depth"] = c.max_depth ? nlohmann::ordered_json(*c.max_depth) : nullptr;
  cons["max_cx"] = c.max_cx ? nlohmann::ordered_json(*c.max_cx) : nullptr;
  cons["max_single"] = c.max_single ? nlohmann::ordered_json(*c.max_single) : nullptr;
  j["constraints"] = std::move(cons);
  j["metrics"] = metrics_json(r.metrics);
  j["accounting"] = metrics_json(r.accounting);
  j["qubits"] = r.circuit.num_qubits;
  j["gates"] = r.circuit.gates.size();
  nlohmann::ordered_json st;
  st["decisions"] = r.stats.decisions;
  st["propagations"] = r.stats.propagations;
  st["leaves"] = r.stats.leaves;
  st["expansions"] = r.stats.expansions;
  st["exhausted"] = r.stats.exhausted;
  j["stats"] = std::move(st);
  return j;
}

int run_synth(const std::string& model_path, const CommonOpts& c, const std::string& out_qasm,
              const std::string& out_report, const std::string& dump_graph,
              const std::string& trace_path, bool check) {
  const qsynth::Model m = qsynth::parse_model(read_file(model_path));
  if (!dump_graph.empty()) emit_text(dump_graph, qsynth::to_dot(qsynth::lower(m)));

  SolveOptions opts = c.solve_options();
  std::ofstream trace_stream;
  if (!trace_path.empty()) {
    trace_stream.open(trace_path, std::ios::trunc);
    if (!trace_stream) throw std::runtime_error("cannot write " + trace_path);
    opts.trace = &trace_stream;
  }

  const qsynth::SynthesisReport r =
      qsynth::synthesize(m, c.constraints(), parse_objective(c.objective), opts);

  if (!out_report.empty()) emit_text(out_report, report_json(r, c).dump(2) + "\n");
  if (r.feasible && !out_qasm.empty()) emit_text(out_qasm, qsynth::to_qasm(r.circuit));

  if (!r.feasible) {
    if (r.stats.exhausted) {
      std::cerr << "infeasible: constraints admit no implementation\n";
      return 1;
    }
    std::cerr << "no solution within budget\n";
    return 3;
  }
  std::cerr << "feasible" << (r.optimal ? " optimal" : "") << " width=" << r.metrics.width
            << " depth=" << r.metrics.depth << " cx=" << r.metrics.counts.cx
            << " single=" << r.metrics.counts.single << "\n";
  if (check) {
    if (!qsynth::verify_semantics(m, r.circuit)) {
      std::cerr << "verification failed\n";
      return 1;
    }
    std::cerr << "verification ok\n";
  }
  return 0;
}

int run_verify(const std::string& model_path, const std::string& qasm_path, double tol) {
  const qsynth::Model m = qsynth::parse_model(read_file(model_path));
  const qsynth::Circuit c = qsynth::parse_qasm(read_file(qasm_path));
  if (qsynth::verify_semantics(m, c, tol)) {
    std::cerr << "match\n";
    return 0;
  }
  std::cerr << "mismatch\n";
  return 1;
}

int run_bench(const std::string& family, uint32_t n_min, uint32_t n_max, uint32_t n_step,
              uint32_t degree, const CommonOpts& c, const std::string& out, uint32_t jobs) {
  if (n_min == 0 || n_max < n_min || n_step == 0) throw std::runtime_error("bad N range");
  std::vector<uint32_t> ns;
  for (uint32_t n = n_min; n <= n_max; n += n_step) ns.push_back(n);
  std::vector<qsynth::BenchRow> rows(ns.size());

  const Objective obj = parse_objective(c.objective);
  const auto worker = [&](size_t first, size_t stride) {
    for (size_t i = first; i < ns.size(); i += stride) {
      const uint32_t n = ns[i];
      qsynth::Model m = family == "walk" ? qsynth::build_walk_model(n)
                        : family == "encoding"
                            ? qsynth::build_block_encoding_model(n)
                            : qsynth::build_qsvt_model(
                                  n, qsynth::random_phases(degree + 1, c.seed + 17));
      SolveOptions opts = c.solve_options();
      opts.seed = c.seed + i;
      rows[i] = qsynth::run_case(family, m, n, c.constraints(), obj, opts);
    }
  };
  if (jobs <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (uint32_t t = 0; t < jobs; ++t) pool.emplace_back(worker, t, jobs);
    for (auto& t : pool) t.join();
  }
  emit_text(out, qsynth::bench_csv(rows));
  return 0;
}

int run_profile_dump(const std::string& out) {
  std::vector<qsynth::LibFn> fns;
  for (uint32_t n = 2; n <= 12; ++n) fns.push_back(qsynth::mcx_fn(n));
  for (uint32_t w = 4; w <= 32; w += 4) fns.push_back(qsynth::add_const_fn(w, 1));
  fns.push_back(qsynth::mch_fn());
  fns.push_back(qsynth::mch_fn(1));
  emit_text(out, qsynth::profiles_csv(fns));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource-aware synthesis of gate-level circuits from high-level models"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string model_path, qasm_out, report_out, graph_out, trace_out;
  bool check = false;
  CLI::App* synth = app.add_subcommand("synth", "Synthesize a model under resource constraints");
  synth->add_option("model", model_path, "Model JSON file")->required();
  add_common(synth, common);
  synth->add_option("--out", qasm_out, "Write the circuit as QASM here ('-' for stdout)");
  synth->add_option("--report", report_out, "Write a JSON report here");
  synth->add_option("--dump-graph", graph_out, "Write the lowered call graph as DOT");
  synth->add_option("--trace-propagation", trace_out, "Write a propagation trace here");
  synth->add_flag("--verify", check, "Densely check the circuit against the model");

  std::string verify_model, verify_qasm;
  double tol = 1e-9;
  CLI::App* verify = app.add_subcommand("verify", "Check a QASM circuit against a model");
  verify->add_option("model", verify_model, "Model JSON file")->required();
  verify->add_option("circuit", verify_qasm, "QASM file")->required();
  verify->add_option("--tol", tol, "Comparison tolerance");

  CommonOpts bench_common;
  bench_common.objective = "cx";
  std::string family = "walk", bench_out;
  uint32_t n_min = 2, n_max = 6, n_step = 1, degree = 3, jobs = 1;
  CLI::App* bench = app.add_subcommand("bench", "Sweep a model family over N");
  bench->add_option("--family", family, "walk|encoding|iterates")
      ->check(CLI::IsMember({"walk", "encoding", "iterates"}));
  bench->add_option("--n-min", n_min, "Smallest N");
  bench->add_option("--n-max", n_max, "Largest N");
  bench->add_option("--n-step", n_step, "N stride");
  bench->add_option("--degree", degree, "Iterate count for the iterates family");
  bench->add_option("--jobs", jobs, "Worker threads (row order stays fixed)");
  add_common(bench, bench_common);
  bench->add_option("--out", bench_out, "Write the CSV here ('-' for stdout)");

  std::string profile_out;
  CLI::App* prof = app.add_subcommand("profile-dump", "Print the implementation trade-off table");
  prof->add_option("--out", profile_out, "Write the CSV here ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth)
      return run_synth(model_path, common, qasm_out, report_out, graph_out, trace_out, check);
    if (*verify) return run_verify(verify_model, verify_qasm, tol);
    if (*bench)
      return run_bench(family, n_min, n_max, n_step, degree, bench_common, bench_out, jobs);
    return run_profile_dump(profile_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
