#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"
#include "memcat/litmus.hpp"

namespace memcat {

// rf choices: every read mapped to one same-location write, first read most significant
std::vector<Relation> enumerate_rf(const Program& prog);
// co choices: per location every permutation of program writes after the init write,
// first location most significant, permutations in lexicographic rank
std::vector<Relation> enumerate_co(const Program& prog);

class CandidateStream {
 public:
  explicit CandidateStream(std::shared_ptr<const Program> prog, bool prune_sc_per_location = false);
  std::optional<Candidate> next();
  std::size_t total() const { return total_; }
  std::size_t well_formed() const { return well_formed_; }
  std::size_t size_hint() const { return cos_.size() * rfs_.size(); }

 private:
  std::shared_ptr<const Program> prog_;
  bool prune_;
  std::vector<Relation> rfs_, cos_;
  std::size_t co_i_ = 0, rf_i_ = 0;
  std::size_t total_ = 0, well_formed_ = 0;
};

std::vector<Candidate> build_candidates(std::shared_ptr<const Program> prog,
                                        bool prune_sc_per_location = false);

bool sc_per_location_holds(const Candidate& c);

using State = std::map<std::string, long>;
std::string state_string(const State& s);

// load destinations and every location, as the candidate leaves them
State final_state(const Candidate& c);
bool evaluate_final(const Candidate& c, const Cond& clause);

struct ModelAst;
struct EvalOptions;

struct CandidateVerdict {
  std::size_t index = 0;
  bool allowed = false;
  bool satisfies = false;
  std::vector<std::string> failed_checks;
};

struct VerdictReport {
  bool condition_reachable = false;  // some allowed candidate satisfies the clause
  bool condition_holds = false;      // the quantified condition is true
  std::set<std::string> allowed_states;
  std::vector<CandidateVerdict> per_candidate;
  std::size_t candidates = 0;
  std::size_t allowed = 0;
  std::map<std::string, std::size_t> check_failures;
};

VerdictReport verdict(std::shared_ptr<const Program> prog, const ModelAst& model,
                      const EvalOptions& opts, bool prune_sc_per_location = false);

}  // namespace memcat
