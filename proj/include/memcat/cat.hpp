#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"
#include "memcat/relation.hpp"

namespace memcat {

class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Union, Inter, Diff, Seq, Plus, Star, Empty, Id, Filter };
  Op op = Op::Empty;
  std::string name;  // Id
  Dir src = Dir::M, tgt = Dir::M;  // Filter
  std::vector<ExprPtr> kids;
  int line = 0, col = 0;
};

struct Stmt {
  enum class Kind { Let, LetRec, Check };
  enum class CheckKind { Acyclic, Irreflexive };
  Kind kind = Kind::Let;
  std::vector<std::pair<std::string, ExprPtr>> bindings;  // Let: one, LetRec: the group
  CheckKind check = CheckKind::Acyclic;
  ExprPtr expr;      // Check
  std::string name;  // Check
  int line = 0;
};

struct ModelAst {
  std::vector<Stmt> stmts;
  std::vector<std::string> check_names() const;
  bool binds(const std::string& name) const;
};

const std::set<std::string>& builtin_names();

ModelAst parse_model(const std::string& text);
// Throws ModelError naming the recursive identifier found under '\'.
void check_recursive_monotone(const ModelAst& ast);
std::string print_expr(const Expr& e);

using Env = std::map<std::string, Relation>;
Env builtin_env(const Candidate& c);

struct EvalOptions {
  bool static_ppo = false;  // bind rdw and detour to the empty relation
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::vector<EventId> witness;
};

struct Verdict {
  bool allowed = true;
  std::vector<CheckResult> checks;
  std::vector<std::string> failed() const;
};

struct Evaluation {
  Verdict verdict;
  Env env;
  int fixpoint_rounds = 0;
};

Evaluation evaluate(const ModelAst& ast, const Candidate& c, const EvalOptions& opts = {});
Verdict eval_model(const ModelAst& ast, const Candidate& c, const EvalOptions& opts = {});

}  // namespace memcat
