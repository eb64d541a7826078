#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "farcheck/transitions.hpp"
#include "farcheck/verdict.hpp"

namespace far {

struct EngineConfig {
  int64_t max_steps = 100000;  // rule applications
  double timeout_s = 0;        // 0 = unlimited
  bool fifo_queue = false;     // insertion order instead of fewest-procs-first
  bool check_graph = false;    // re-validate edge soundness after every rule
  int32_t max_bad_arity = 4;
  int64_t solver_branch_budget = 1 << 16;
};

struct EngineStats {
  std::string verdict;
  int64_t vertices_created = 0;  // Refine-created
  int64_t edges = 0;             // final |E|
  int64_t covers = 0;
  int64_t refines = 0;
  int64_t bad_propagations = 0;
  int64_t solver_calls = 0;
  int64_t elapsed_ms = 0;
  int64_t steps = 0;  // internal; not part of the JSON schema

  std::string json() const;
};

// The unwinding: three initial vertices (root, unsafe, sink), worlds refined
// away from bad parts, edges redirected by Cover/Refine. Deterministic given
// the system and config.
class Engine {
public:
  explicit Engine(const CoreSystem& sys, EngineConfig cfg = {});

  Verdict run();

  const EngineStats& stats() const { return stats_; }
  std::string export_dot(bool hide_sink) const;

  // Worlds of the root-reachable vertices (minus the sink); audits every
  // edge's soundness and every world's exclusion of unsafe first. Only valid
  // after a Safe run; throws AuditFailure on any audit miss.
  std::vector<World> extract_invariant();

  // Every cube ever inserted into a bad set, insertion order, starting with
  // unsafe.
  const std::vector<Cube>& bad_log() const { return bad_log_; }
  const CubeStore& store() const { return store_; }
  const CoreSystem& system() const { return sys_; }
  Solver& solver() { return solver_; }

private:
  struct Vertex {
    World world;
    CubeSet bads;
    int32_t parent = -1;  // vertex this one refined; -1 for initials
  };
  struct BadProv {
    int32_t tau = 0;
    int32_t succ_vertex = 0;
    CubeId succ_cube = 0;
    PreCube pre;
  };
  struct CloseResult {
    enum class Kind { Covered, Bad, Refined } kind;
    int32_t vertex = -1;                     // Covered/Refined
    std::vector<std::pair<Cube, PreCube>> bads;  // Bad
    CubeId against = 0;                      // Bad: the B(v') cube hit
  };
  enum : int32_t { kEps = 0, kBeta = 1, kOmega = 2 };

  Verdict run_inner();
  void push_queue(int32_t v);
  bool unwind(int32_t src, int32_t tau);  // true = unsafe reached
  CloseResult close(int32_t src, int32_t tau, int32_t dst,
                    const std::vector<int32_t>& tried);
  Cube generalize(int32_t src, int32_t tau, const Cube& bad,
                  const CubeSet& taken);
  Trace build_trace(const Cube& root_bad, const PreCube& root_pre,
                    int32_t tau, int32_t succ_vertex, CubeId succ_cube,
                    const SatModel& init_model);
  void bump_step();
  void check_graph_invariant();
  std::vector<int32_t> reachable() const;
  int32_t queue_key(const World& w) const;

  const CoreSystem& sys_;
  EngineConfig cfg_;
  CubeStore store_;
  Solver solver_;
  std::vector<Vertex> verts_;
  std::set<std::tuple<int32_t, int64_t, int32_t>> queue_;  // (key, seq, vertex)
  int64_t seq_ = 0;
  std::map<std::pair<int32_t, int32_t>, int32_t> edges_;  // (src, tau) -> dst
  std::map<std::pair<int32_t, CubeId>, BadProv> prov_;
  std::vector<Cube> bad_log_;
  EngineStats stats_;
  bool ran_ = false;
  Verdict verdict_;
  std::chrono::steady_clock::time_point deadline_{};
  bool has_deadline_ = false;
};

}  // namespace far
