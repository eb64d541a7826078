#include "farcheck/diff.hpp"

#include <stdexcept>

#include "farcheck/diag.hpp"

namespace far {

namespace {

std::string kind_name(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Safe: return "Safe";
    case Verdict::Kind::Unsafe: return "Unsafe";
    case Verdict::Kind::Inconclusive: break;
  }
  return "Inconclusive";
}

}  // namespace

void triangle_check(DiffReport& r) {
  r.consistent = true;
  r.violations.clear();
  auto flag = [&](const std::string& s) {
    r.consistent = false;
    r.violations.push_back(s);
  };
  const Verdict& f = r.far_verdict;
  const Verdict& b = r.backward_verdict;
  bool f_conclusive = f.kind != Verdict::Kind::Inconclusive;
  bool b_conclusive = b.kind != Verdict::Kind::Inconclusive;
  if (f_conclusive && b_conclusive && f.kind != b.kind)
    flag("far " + kind_name(f) + " but backward " + kind_name(b));
  for (const auto& [n, e] : r.explicit_verdicts) {
    if (f.safe() && e.unsafe())
      flag("far Safe but explicit Unsafe at N=" + std::to_string(n));
  }
}

DiffReport run_diff(const CoreSystem& sys, const EngineConfig& engine_cfg,
                    const Verdict* far_override) {
  DiffReport r;
  if (far_override) {
    r.far_verdict = *far_override;
  } else {
    Engine eng(sys, engine_cfg);
    r.far_verdict = eng.run();
  }
  BackwardConfig bc;
  bc.timeout_s = engine_cfg.timeout_s;
  bc.max_bad_arity = engine_cfg.max_bad_arity;
  bc.solver_branch_budget = engine_cfg.solver_branch_budget;
  r.backward_verdict = backward_reach(sys, bc);
  for (int32_t n : {2, 3}) {
    Verdict v;
    try {
      v = explicit_reach(sys, n).verdict;
    } catch (const StateLimit& e) {
      v = Verdict::inconclusive(e.what());
    } catch (const std::invalid_argument& e) {
      v = Verdict::inconclusive(e.what());
    }
    r.explicit_verdicts.emplace_back(n, std::move(v));
  }
  triangle_check(r);
  return r;
}

}  // namespace far
