#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "farcheck/backward.hpp"
#include "farcheck/diag.hpp"
#include "farcheck/diff.hpp"
#include "farcheck/engine.hpp"
#include "farcheck/explicit_state.hpp"
#include "farcheck/system.hpp"
#include "farcheck/trace_io.hpp"

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInconsistent = 3;
constexpr int kExitUnsafe = 10;
constexpr int kExitInconclusive = 20;

int verdict_code(const far::Verdict& v) {
  switch (v.kind) {
    case far::Verdict::Kind::Safe: return kExitSafe;
    case far::Verdict::Kind::Unsafe: return kExitUnsafe;
    case far::Verdict::Kind::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

far::CoreSystem load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return far::elaborate(far::parse(buf.str()));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
}

struct CheckOpts {
  std::string file;
  std::string engine = "far";
  int32_t nprocs = 0;
  int64_t max_steps = 100000;
  double timeout_s = 0;
  std::string queue_order = "procs";
  bool check_graph = false;
  bool hide_sink = false;
  bool verbose = false;
  std::string dot_path, stats_path, trace_path, dump_path;
  std::string inject;
  bool has_procs = false;
};

far::EngineConfig engine_config(const CheckOpts& o) {
  far::EngineConfig cfg;
  cfg.max_steps = o.max_steps;
  cfg.timeout_s = o.timeout_s;
  cfg.fifo_queue = o.queue_order == "fifo";
  cfg.check_graph = o.check_graph;
  return cfg;
}

std::string model_name(const CheckOpts& o) {
  return std::filesystem::path(o.file).stem().string();
}

void emit_trace(const CheckOpts& o, const far::CoreSystem& sys,
                const far::Verdict& v) {
  if (o.trace_path.empty() || !v.unsafe()) return;
  write_file(o.trace_path, far::format_trace(model_name(o), v.trace, sys));
}

int run_far(const CheckOpts& o, const far::CoreSystem& sys) {
  far::Engine eng(sys, engine_config(o));
  std::ofstream dump;
  if (!o.dump_path.empty()) {
    dump.open(o.dump_path, std::ios::binary);
    if (!dump) throw std::runtime_error(o.dump_path + ": cannot open for writing");
    eng.solver().set_dump(&dump);
  }
  far::Verdict v = eng.run();
  std::cout << far::verdict_line(v) << "\n";
  if (o.verbose) std::cout << "stats: " << eng.stats().json() << "\n";
  if (!o.dot_path.empty()) write_file(o.dot_path, eng.export_dot(o.hide_sink));
  if (!o.stats_path.empty()) write_file(o.stats_path, eng.stats().json() + "\n");
  emit_trace(o, sys, v);
  return verdict_code(v);
}

int run_backward(const CheckOpts& o, const far::CoreSystem& sys) {
  far::BackwardConfig cfg;
  cfg.max_cubes = o.max_steps;
  cfg.timeout_s = o.timeout_s;
  far::Verdict v = far::backward_reach(sys, cfg);
  std::cout << far::verdict_line(v) << "\n";
  emit_trace(o, sys, v);
  return verdict_code(v);
}

int run_explicit(const CheckOpts& o, const far::CoreSystem& sys) {
  far::ExplicitResult r;
  try {
    r = far::explicit_reach(sys, o.nprocs);
  } catch (const far::StateLimit& e) {
    far::Verdict v = far::Verdict::inconclusive(e.what());
    std::cout << far::verdict_line(v) << "\n";
    return kExitInconclusive;
  }
  std::cout << far::verdict_line(r.verdict) << "\n";
  if (o.verbose) std::cout << "states: " << r.nstates << "\n";
  emit_trace(o, sys, r.verdict);
  return verdict_code(r.verdict);
}

int run_diff_mode(const CheckOpts& o, const far::CoreSystem& sys) {
  far::Verdict injected;
  const far::Verdict* override_ptr = nullptr;
  if (!o.inject.empty()) {
    if (o.inject == "SAFE") injected = far::Verdict::mk_safe();
    else if (o.inject == "UNSAFE") injected = far::Verdict::mk_unsafe({});
    else injected = far::Verdict::inconclusive("injected");
    override_ptr = &injected;
  }
  far::DiffReport r = far::run_diff(sys, engine_config(o), override_ptr);
  std::cout << far::verdict_line(r.far_verdict) << "\n";
  std::cout << "far: " << far::verdict_line(r.far_verdict) << "\n";
  std::cout << "backward: " << far::verdict_line(r.backward_verdict) << "\n";
  for (const auto& [n, v] : r.explicit_verdicts)
    std::cout << "explicit N=" << n << ": " << far::verdict_line(v) << "\n";
  for (const std::string& s : r.violations)
    std::cout << "violation: " << s << "\n";
  std::cout << (r.consistent ? "CONSISTENT" : "INCONSISTENT") << "\n";
  if (!r.consistent) return kExitInconsistent;
  return verdict_code(r.far_verdict);
}

int run_check(const CheckOpts& o) {
  far::CoreSystem sys = load_model(o.file);
  if (o.engine == "far") return run_far(o, sys);
  if (o.engine == "backward") return run_backward(o, sys);
  if (o.engine == "explicit") return run_explicit(o, sys);
  return run_diff_mode(o, sys);
}

int run_corpus(const std::string& dir, int64_t max_steps, double timeout_s) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(dir))
    throw std::runtime_error(dir + ": not a directory");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".fcub") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error(dir + ": no .fcub models found");

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"model", "far", "backward", "explicit(2)", "explicit(3)",
                  "triangle"});
  bool all_consistent = true;
  for (const std::string& f : files) {
    far::CoreSystem sys = load_model(f);
    far::EngineConfig cfg;
    cfg.max_steps = max_steps;
    cfg.timeout_s = timeout_s;
    far::DiffReport r = far::run_diff(sys, cfg);
    all_consistent = all_consistent && r.consistent;
    rows.push_back({fs::path(f).stem().string(),
                    far::verdict_line(r.far_verdict),
                    far::verdict_line(r.backward_verdict),
                    far::verdict_line(r.explicit_verdicts[0].second),
                    far::verdict_line(r.explicit_verdicts[1].second),
                    r.consistent ? "CONSISTENT" : "INCONSISTENT"});
  }
  std::vector<size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size())
        line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    std::cout << line << "\n";
  }
  return all_consistent ? kExitSafe : kExitInconsistent;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"farcheck: parameterized safety verification for array-based systems"};
  app.require_subcommand(1);

  CheckOpts o;
  auto* check = app.add_subcommand("check", "Verify one model file");
  check->add_option("file", o.file, "Model file (.fcub)")->required();
  check->add_option("--engine", o.engine,
                    "Verification engine (default: far)")
      ->check(CLI::IsMember({"far", "backward", "explicit", "diff"}));
  auto* procs_opt = check->add_option(
      "-N,--procs", o.nprocs, "Instance size (explicit engine only)");
  check->add_option("--max-steps", o.max_steps,
                    "Rule-application budget (far), frontier pops (backward)");
  check->add_option("--timeout", o.timeout_s, "Wall-clock budget in seconds");
  check->add_option("--queue-order", o.queue_order,
                    "far queue priority: procs (fewest-procs-first) or fifo")
      ->check(CLI::IsMember({"procs", "fifo"}));
  check->add_flag("--check-graph", o.check_graph,
                  "Re-validate edge soundness after every rule (far, slow)");
  check->add_option("--dot", o.dot_path, "Write the unwinding graph (far)");
  check->add_flag("--hide-sink", o.hide_sink,
                  "Omit the sink vertex from --dot output");
  check->add_option("--stats", o.stats_path, "Write run statistics JSON (far)");
  check->add_option("--trace", o.trace_path,
                    "Write the counterexample trace on UNSAFE");
  check->add_option("--dump-queries", o.dump_path,
                    "Write every solver query as JSONL (far)");
  check->add_flag("-v,--verbose", o.verbose, "Extra detail after the verdict");
  check
      ->add_option("--inject-far-verdict", o.inject,
                   "Test hook: replace the far verdict in diff mode")
      ->check(CLI::IsMember({"SAFE", "UNSAFE", "INCONCLUSIVE"}))
      ->group("");

  std::string corpus_dir = "models";
  int64_t corpus_steps = 100000;
  double corpus_timeout = 0;
  auto* corpus = app.add_subcommand(
      "corpus", "Run the differential triangle over a model directory");
  corpus->add_option("dir", corpus_dir, "Directory of .fcub models");
  corpus->add_option("--max-steps", corpus_steps, "Per-model budget");
  corpus->add_option("--timeout", corpus_timeout, "Per-model timeout (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*check) {
      o.has_procs = procs_opt->count() > 0;
      if ((o.engine == "explicit") != o.has_procs) {
        std::cerr << (o.engine == "explicit"
                          ? "--engine explicit requires -N"
                          : "-N only applies to --engine explicit")
                  << "\n";
        return kExitUsage;
      }
      if (!o.inject.empty() && o.engine != "diff") {
        std::cerr << "--inject-far-verdict only applies to --engine diff\n";
        return kExitUsage;
      }
      return run_check(o);
    }
    return run_corpus(corpus_dir, corpus_steps, corpus_timeout);
  } catch (const far::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
}
