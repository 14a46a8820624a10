#include <doctest.h>

#include <string>

#include "memcat/cat.hpp"
#include "memcat/corpus.hpp"
#include "memcat/enumerate.hpp"
#include "memcat/models.hpp"

using namespace memcat;

namespace {

std::string model_error(const std::string& text) {
  try {
    ModelAst a = parse_model(text);
    check_recursive_monotone(a);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

const Expr& let_expr(const ModelAst& a, std::size_t i) { return *a.stmts.at(i).bindings.at(0).second; }

}  // namespace

TEST_CASE("operator precedence") {
  ModelAst a = parse_model("let x = po|rf;co\\fr&co+\nlet y = (po|rf);co*");
  CHECK(print_expr(let_expr(a, 0)) == "(po|(rf;(co\\(fr&co+))))");
  CHECK(print_expr(let_expr(a, 1)) == "((po|rf);co*)");
  const Expr& x = let_expr(a, 0);
  CHECK(x.op == Expr::Op::Union);
  CHECK(x.kids[1]->op == Expr::Op::Seq);
}

TEST_CASE("direction filters and the empty relation") {
  ModelAst a = parse_model("let x = WR(po)|RM(0)");
  const Expr& x = let_expr(a, 0);
  REQUIRE(x.kids[0]->op == Expr::Op::Filter);
  CHECK(x.kids[0]->src == Dir::W);
  CHECK(x.kids[0]->tgt == Dir::R);
  CHECK(x.kids[1]->kids[0]->op == Expr::Op::Empty);
}

TEST_CASE("check names come from the preceding comment") {
  CHECK(load_builtin("power").ast.check_names() ==
        std::vector<std::string>{"sc-per-location", "no-thin-air", "observation", "propagation"});
  ModelAst a = parse_model("acyclic po\nirreflexive rf as mine\n(* Last One *) acyclic co");
  CHECK(a.check_names() == std::vector<std::string>{"check1", "mine", "last-one"});
}

TEST_CASE("model errors") {
  CHECK(model_error("let x = nope").find("unbound identifier 'nope'") != std::string::npos);
  CHECK(model_error("let x = po\nlet x = rf").find("duplicate binding") != std::string::npos);
  CHECK(model_error("let x = 2").find("only the constant 0") != std::string::npos);
  CHECK(model_error("(* open").find("unterminated comment") != std::string::npos);
  CHECK(model_error("acyclic po |").find("expected an expression") != std::string::npos);
  CHECK(model_error("frob po").find("expected let") != std::string::npos);
  CHECK(model_error("let rec a = po\\a").find("recursive name 'a'") != std::string::npos);
  CHECK(model_error("let rec a = po|(a;a)\nand b = a|b") == "");
  try {
    parse_model("let x = po\n  let y = %");
    FAIL("expected a model error");
  } catch (const ModelError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 11);
  }
}

TEST_CASE("recursive bindings compute the least fixpoint") {
  ModelAst a = parse_model("let rec t = po|(t;t)\nlet u = po+");
  auto corpus = load_corpus();
  for (const char* name : {"iriw", "lb+addrs", "mp+lwsync+addr"}) {
    for (const auto& c : build_candidates(find_test(corpus, name).prog)) {
      Evaluation ev = evaluate(a, c);
      CHECK(ev.env.at("t") == ev.env.at("u"));
      CHECK(ev.fixpoint_rounds >= 1);
    }
  }
}

TEST_CASE("the Power ppo solution satisfies its own equations") {
  const ModelAst power = load_builtin("power").ast;
  auto corpus = load_corpus();
  for (const char* name : {"mp+lwsync+ctrlisync", "lb+datas+ww", "s+lwsync+addr", "wrc+lwsync+addr"}) {
    for (const auto& c : build_candidates(find_test(corpus, name).prog)) {
      Env e = evaluate(power, c).env;
      auto& ii = e["ii"];
      auto& ic = e["ic"];
      auto& ci = e["ci"];
      auto& cc = e["cc"];
      CHECK(ii == (e["ii0"] | ci | compose(ic, ci) | compose(ii, ii)));
      CHECK(ic == (e["ic0"] | ii | cc | compose(ic, cc) | compose(ii, ic)));
      CHECK(ci == (e["ci0"] | compose(ci, ii) | compose(cc, ci)));
      CHECK(cc == (e["cc0"] | ci | compose(ci, ic) | compose(cc, cc)));
      CHECK(e["ppo"].subset_of(c.prog->po));
    }
  }
}

TEST_CASE("static ppo drops the dynamic read-write components") {
  const ModelAst power = load_builtin("power").ast;
  for (const auto& c : build_candidates(find_test(load_corpus(), "mp+dmb+fri-rfi-ctrlisb").prog)) {
    Env st = evaluate(power, c, EvalOptions{true}).env;
    CHECK(st.at("rdw").empty());
    CHECK(st.at("detour").empty());
    CHECK(st.at("ppo").subset_of(evaluate(power, c).env.at("ppo")));
  }
}

TEST_CASE("verdict records failing checks with witnesses") {
  auto prog = find_test(load_corpus(), "coWW").prog;
  const ModelAst sc = load_builtin("sc").ast;
  std::size_t rejected = 0;
  for (const auto& c : build_candidates(prog)) {
    Verdict v = eval_model(sc, c);
    if (v.allowed) continue;
    ++rejected;
    REQUIRE(v.failed().size() >= 1);
    CHECK(v.failed()[0] == "sc-per-location");
    CHECK_FALSE(v.checks[0].witness.empty());
  }
  CHECK(rejected == 1);
}
