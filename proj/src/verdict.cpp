#include "memcat/cat.hpp"
#include "memcat/enumerate.hpp"

namespace memcat {

VerdictReport verdict(std::shared_ptr<const Program> prog, const ModelAst& model,
                      const EvalOptions& opts, bool prune_sc_per_location) {
  VerdictReport rep;
  const FinalCondition& fc = prog->test->final;
  CandidateStream stream(prog, prune_sc_per_location);
  bool all_satisfy = true;
  std::size_t i = 0;
  while (auto c = stream.next()) {
    CandidateVerdict cv;
    cv.index = i++;
    Verdict v = eval_model(model, *c, opts);
    cv.allowed = v.allowed;
    cv.failed_checks = v.failed();
    for (const auto& f : cv.failed_checks) ++rep.check_failures[f];
    cv.satisfies = evaluate_final(*c, fc.clause);
    if (cv.allowed) {
      ++rep.allowed;
      rep.allowed_states.insert(state_string(final_state(*c)));
      if (cv.satisfies) rep.condition_reachable = true;
      else all_satisfy = false;
    }
    rep.per_candidate.push_back(std::move(cv));
  }
  rep.candidates = stream.total();
  using Q = FinalCondition::Quantifier;
  switch (fc.quantifier) {
    case Q::Exists: rep.condition_holds = rep.condition_reachable; break;
    case Q::NotExists: rep.condition_holds = !rep.condition_reachable; break;
    case Q::Forall: rep.condition_holds = all_satisfy; break;
    case Q::Observed: rep.condition_holds = true; break;
  }
  return rep;
}

}  // namespace memcat
