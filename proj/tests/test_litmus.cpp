#include <doctest.h>

#include <string>

#include "memcat/corpus.hpp"
#include "memcat/litmus.hpp"

using namespace memcat;

namespace {

const char* kMp = R"(mp+lwsync+addr Power
init { x=0; y=0; }
thread T0 {
  store [x], 1
  lwsync
  store [y], 1
}
thread T1 {
  load r1,[y]
  xor r9,r1,r1
  load r2,[x+r9]
}
final exists (T1:r1=1 /\ T1:r2=0)
expect { power: forbidden; sc: forbidden; }
)";

std::string error_of(const std::string& text) {
  try {
    build_program(parse_litmus(text));
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

std::string with_thread(const std::string& body, const std::string& arch = "Power") {
  return "t " + arch + "\ninit { x=0; y=0; }\nthread T0 {\n" + body + "\n}\nfinal exists (x=1)\n";
}

}  // namespace

TEST_CASE("parse a dependency test") {
  LitmusTest t = parse_litmus(kMp);
  CHECK(t.name == "mp+lwsync+addr");
  CHECK(t.arch == Arch::Power);
  CHECK(t.threads.size() == 2);
  CHECK(t.memory_accesses() == 4);
  CHECK(t.locations() == std::vector<std::string>{"x", "y"});
  CHECK(t.final.quantifier == FinalCondition::Quantifier::Exists);
  CHECK(t.expect.size() == 2);
}

TEST_CASE("print and reparse is a fixpoint") {
  LitmusTest t = parse_litmus(kMp);
  std::string once = print_litmus(t);
  std::string twice = print_litmus(parse_litmus(once));
  CHECK(once == twice);
}

TEST_CASE("every bundled test round-trips through the printer") {
  auto corpus = load_corpus();
  CHECK(corpus.size() >= 30);
  for (const auto& e : corpus) {
    std::string once = print_litmus(e.test);
    CHECK_MESSAGE(print_litmus(parse_litmus(once)) == once, e.test.name);
  }
}

TEST_CASE("projection and dependencies") {
  auto prog = build_program(parse_litmus(kMp));
  REQUIRE(prog->n_program == 4);
  REQUIRE(prog->size() == 6);
  CHECK(prog->event_name(0) == "a");
  CHECK(prog->event_name(4) == "ix");
  CHECK(prog->events[4].is_init());
  CHECK(prog->po.contains(0, 1));
  CHECK(prog->po.contains(2, 3));
  CHECK_FALSE(prog->po.contains(1, 2));
  CHECK(prog->addr.contains(2, 3));
  CHECK(prog->data.empty());
  CHECK(prog->ctrl.empty());
  CHECK(prog->fences.at(FenceKind::Lwsync).contains(0, 1));
  CHECK_FALSE(prog->fences.at(FenceKind::Lwsync).contains(2, 3));
  CHECK(prog->events[3].loc == 0);
}

TEST_CASE("data and control dependencies") {
  auto data = build_program(find_test(load_corpus(), "lb+datas+ww").test);
  CHECK(data->data.contains(0, 1));
  CHECK(data->addr.empty());
  auto ctrl = build_program(find_test(load_corpus(), "mp+lwsync+ctrlisync").test);
  CHECK(ctrl->ctrl.contains(2, 3));
  CHECK(ctrl->ctrl_cfence.contains(2, 3));
  auto plain = build_program(find_test(load_corpus(), "mp+lwsync+ctrl").test);
  CHECK(plain->ctrl.contains(2, 3));
  CHECK(plain->ctrl_cfence.empty());
}

TEST_CASE("rejected programs") {
  CHECK(error_of(with_thread("  storeeq [x], 1")).find("conditional execution") != std::string::npos);
  CHECK(error_of(with_thread("  cmp r1,1\n  bne L1\n  store [x], 1\nL1:")).find("immediately following") !=
        std::string::npos);
  CHECK(error_of(with_thread("  bne L9\nL1:")).find("not defined") != std::string::npos);
  CHECK(error_of(with_thread("  frobnicate")).find("unknown instruction") != std::string::npos);
  CHECK(error_of(with_thread("  mfence")).find("does not belong") != std::string::npos);
  CHECK(error_of(with_thread("  dmb", "Power")).find("does not belong") != std::string::npos);
  CHECK(error_of(with_thread("  store [x], r5")).find("undefined register") != std::string::npos);
  CHECK(error_of("t Sparc\n").find("unknown architecture") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
  CHECK(error_of(with_thread("  store [x], 1") + "final exists (T3:r1=0)\n") != "");
}

TEST_CASE("error positions point at the offending token") {
  try {
    parse_litmus("t Power\ninit { x=0; }\nthread T0 {\n  load 7,[x]\n}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.col == 8);
  }
}

TEST_CASE("final register values") {
  auto prog = build_program(parse_litmus(kMp));
  // read values indexed by event: a,b writes; c reads 1, d reads 0
  std::vector<int> values = {1, 1, 1, 0, 0, 0};
  auto regs = final_registers(*prog, values);
  REQUIRE(regs.size() == 2);
  CHECK(regs[1].at("r1") == Value{Value::Kind::Int, 1, -1});
  CHECK(regs[1].at("r2") == Value{Value::Kind::Int, 0, -1});
  CHECK(regs[1].at("r9") == Value{Value::Kind::Int, 0, -1});
}
