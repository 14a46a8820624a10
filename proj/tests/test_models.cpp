#include <doctest.h>

#include <algorithm>
#include <string>

#include "memcat/cat.hpp"
#include "memcat/corpus.hpp"
#include "memcat/enumerate.hpp"
#include "memcat/models.hpp"

using namespace memcat;

namespace {

std::string verdict_of(const CorpusEntry& e, const std::string& model) {
  auto r = verdict(e.prog, load_builtin(model).ast, {});
  return r.condition_reachable ? "allowed" : "forbidden";
}

}  // namespace

TEST_CASE("builtin models load and bind the four derived relations") {
  for (const auto& name : builtin_model_names()) {
    BuiltinModel m = load_builtin(name);
    CHECK(m.name == name);
    for (const char* rel : {"ppo", "fence", "prop", "hb"}) CHECK_MESSAGE(m.ast.binds(rel), name << " " << rel);
    auto checks = m.ast.check_names();
    CHECK(std::find(checks.begin(), checks.end(), "sc-per-location") != checks.end());
  }
  CHECK_THROWS(load_builtin("no-such-model"));
}

TEST_CASE("every expect entry of the corpus") {
  auto corpus = load_corpus();
  std::size_t checked = 0;
  for (const auto& e : corpus)
    for (const auto& [model, expected] : e.test.expect) {
      CHECK_MESSAGE(verdict_of(e, model) == expected, e.test.name << " under " << model);
      ++checked;
    }
  CHECK(checked >= 80);
}

TEST_CASE("ARM differs from Power on the read-read hazards") {
  auto corpus = load_corpus();
  for (const char* name : {"mp+dmb+fri-rfi-ctrlisb", "lb+data+fri-rfi-ctrl", "s+dmb+fri-rfi-data"}) {
    const auto& e = find_test(corpus, name);
    CHECK_MESSAGE(verdict_of(e, "arm") == "allowed", name);
    CHECK_MESSAGE(verdict_of(e, "power-as-arm") == "forbidden", name);
  }
  for (const char* name : {"coWW", "coRW1", "coRW2", "coWR", "coRR"}) {
    const auto& e = find_test(corpus, name);
    CHECK(verdict_of(e, "arm") == "forbidden");
    CHECK(verdict_of(e, "arm-llh") == (std::string(name) == "coRR" ? "allowed" : "forbidden"));
  }
}

TEST_CASE("model strength ordering on allowed candidates") {
  // every candidate SC allows is allowed by TSO, and on fence-free code every TSO one by Power
  auto corpus = load_corpus();
  const ModelAst sc = load_builtin("sc").ast;
  const ModelAst tso = load_builtin("tso").ast;
  const ModelAst power = load_builtin("power").ast;
  for (const auto& e : corpus) {
    if (e.prog->arch != Arch::Power) continue;
    for (const auto& c : build_candidates(e.prog)) {
      bool s = eval_model(sc, c).allowed, t = eval_model(tso, c).allowed, p = eval_model(power, c).allowed;
      CHECK_MESSAGE((!s || t), e.test.name);
      if (e.prog->fences.empty() || std::all_of(e.prog->fences.begin(), e.prog->fences.end(),
                                                 [](const auto& f) { return f.second.empty(); }))
        CHECK_MESSAGE((!t || p), e.test.name);
    }
  }
}

TEST_CASE("lwsync between two writes acts like a full fence for write pairs") {
  // 2+2w with lwsync is forbidden, the same as sync would give
  auto corpus = load_corpus();
  CHECK(verdict_of(find_test(corpus, "2+2w+lwsyncs"), "power") == "forbidden");
  CHECK(verdict_of(find_test(corpus, "2+2w"), "power") == "allowed");
  CHECK(verdict_of(find_test(corpus, "r+lwsync+sync"), "power") == "allowed");
  CHECK(verdict_of(find_test(corpus, "r+syncs"), "power") == "forbidden");
}

TEST_CASE("user models by text") {
  BuiltinModel m = model_from_text("weak", "let ppo = 0\nlet fence = 0\nlet prop = 0\nlet hb = rfe\n");
  auto corpus = load_corpus();
  CHECK(verdict_of(find_test(corpus, "sb"), "sc") == "forbidden");
  auto r = verdict(find_test(corpus, "coWW").prog, m.ast, {});
  CHECK(r.allowed == r.candidates);
}
