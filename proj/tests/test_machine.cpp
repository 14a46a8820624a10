#include <doctest.h>

#include "memcat/corpus.hpp"
#include "memcat/enumerate.hpp"
#include "memcat/machine.hpp"
#include "memcat/models.hpp"

using namespace memcat;

namespace {

using K = Label::Kind;

Label cw(EventId w) { return {K::CommitWrite, w, 0}; }
Label cp(EventId w) { return {K::CoherencePoint, w, 0}; }
Label sr(EventId w, EventId r) { return {K::SatisfyRead, w, r}; }
Label cr(EventId w, EventId r) { return {K::CommitRead, w, r}; }

const std::vector<CorpusEntry>& corpus() {
  static const auto c = load_corpus();
  return c;
}

std::shared_ptr<const Program> prog(const char* name) { return find_test(corpus(), name).prog; }

const ModelAst& power() {
  static const ModelAst m = load_builtin("power").ast;
  return m;
}

// context for the candidate a complete path denotes
MachineContext context_of(std::shared_ptr<const Program> p, const Path& path) {
  Derived d = derive_from_path(*p, path);
  return machine_context(make_candidate(p, d.rf, d.co), power());
}

}  // namespace

TEST_CASE("label and path printing") {
  auto p = prog("mp");
  CHECK(path_string(*p, {cw(0), cp(0), sr(4, 3), cr(4, 3)}) == "c(a) cp(a) s(ix,d) c(ix,d)");
}

TEST_CASE("message passing without fences is accepted") {
  // a: W x, b: W y, c: R y, d: R x
  auto p = prog("mp");
  Path path = {cw(1), cp(1), sr(1, 2), cr(1, 2), sr(4, 3), cr(4, 3), cw(0), cp(0)};
  auto res = accepts(p, path, power());
  CHECK(res.accepted);
  CHECK(res.trace.size() == path.size());
  CHECK(res.trace[0] == "c(b)  ok");
}

TEST_CASE("message passing with lwsync and an address dependency is rejected") {
  auto p = prog("mp+lwsync+addr");
  Path path = {cw(1), cp(1), sr(1, 2), cr(1, 2), sr(4, 3), cr(4, 3), cw(0), cp(0)};
  auto res = accepts(p, path, power());
  CHECK_FALSE(res.accepted);
  CHECK(res.blocked_at == 4);
  CHECK(res.premise == "sr:observation");
  CHECK(res.trace.back() == "s(ix,d)  blocked sr:observation");
}

TEST_CASE("store buffering needs syncs to be forbidden") {
  // a: W x, b: R y, c: W y, d: R x
  Path path = {sr(5, 1), cr(5, 1), sr(4, 3), cr(4, 3), cw(0), cp(0), cw(2), cp(2)};
  CHECK(accepts(prog("sb"), path, power()).accepted);
  auto res = accepts(prog("sb+syncs"), path, power());
  CHECK_FALSE(res.accepted);
}

TEST_CASE("load buffering: commits respect dependencies") {
  // a: R x, b: W y, c: R y, d: W x
  Path path = {cw(1), cp(1), cw(3), cp(3), sr(3, 0), cr(3, 0), sr(1, 2), cr(1, 2)};
  CHECK(accepts(prog("lb"), path, power()).accepted);
  auto res = accepts(prog("lb+addrs"), path, power());
  CHECK_FALSE(res.accepted);
}

TEST_CASE("individual step premises") {
  SUBCASE("coWW: a po-loc-later committed write blocks the commit") {
    auto p = prog("coWW");
    Path full = {cw(0), cp(0), cw(1), cp(1)};
    MachineContext ctx = context_of(p, full);
    MachineState s = initial_state(*p);
    CHECK(step(s, cw(1), ctx, *p).ok);
    StepResult r = step(s, cw(0), ctx, *p);
    CHECK_FALSE(r.ok);
    CHECK(r.premise == "cw:coWW");
  }
  SUBCASE("coherence point needs a committed write") {
    auto p = prog("coWW");
    MachineContext ctx = context_of(p, {cw(0), cp(0), cw(1), cp(1)});
    MachineState s = initial_state(*p);
    CHECK(step(s, cp(0), ctx, *p).premise == "cpw:committed");
  }
  SUBCASE("a read may take an uncommitted write of its own thread") {
    // coWR: a: W x, b: R x, c: W x
    auto p = prog("coWR");
    Path full = {cw(0), cp(0), sr(0, 1), cr(0, 1), cw(2), cp(2)};
    MachineContext ctx = context_of(p, full);
    MachineState s = initial_state(*p);
    CHECK(step(s, sr(0, 1), ctx, *p).ok);
  }
  SUBCASE("a read of another thread's uncommitted write is blocked") {
    auto p = prog("mp");
    Path full = {cw(1), cp(1), sr(1, 2), cr(1, 2), sr(4, 3), cr(4, 3), cw(0), cp(0)};
    MachineContext ctx = context_of(p, full);
    MachineState s = initial_state(*p);
    CHECK(step(s, sr(1, 2), ctx, *p).premise == "sr:local-or-committed");
  }
  SUBCASE("commit read needs a prior satisfy") {
    auto p = prog("mp");
    Path full = {cw(1), cp(1), sr(1, 2), cr(1, 2), sr(4, 3), cr(4, 3), cw(0), cp(0)};
    MachineContext ctx = context_of(p, full);
    MachineState s = initial_state(*p);
    CHECK(step(s, cr(4, 3), ctx, *p).premise == "cr:satisfied");
  }
  SUBCASE("coRW1: the read cannot commit from its own po-later write") {
    // coRW1: a: R x, b: W x
    auto p = prog("coRW1");
    Path path = {cw(1), cp(1), sr(1, 0), cr(1, 0)};
    auto res = accepts(p, path, power());
    CHECK_FALSE(res.accepted);
  }
}

TEST_CASE("malformed paths") {
  auto p = prog("mp");
  CHECK_THROWS_AS(derive_from_path(*p, {cw(0), cp(0)}), PathError);
  CHECK_THROWS_AS(derive_from_path(*p, {cw(2)}), PathError);
  CHECK_THROWS_AS(derive_from_path(*p, {cw(4)}), PathError);
  CHECK_THROWS_AS(derive_from_path(*p, {sr(0, 3)}), PathError);
  CHECK_THROWS_AS(derive_from_path(*p, {cw(0), cp(0), cw(1), cp(1), sr(1, 2), cr(5, 2), sr(4, 3), cr(4, 3)}),
                  PathError);
  CHECK_THROWS_AS(derive_from_path(*p, {cw(0), cw(0), cp(0), cw(1), cp(1), sr(1, 2), cr(1, 2), sr(4, 3), cr(4, 3)}),
                  PathError);
}

TEST_CASE("derived co follows the coherence point order") {
  auto p = prog("coWW");
  Derived d = derive_from_path(*p, {cw(0), cw(1), cp(1), cp(0)});
  EventId ix = p->init_write[0];
  CHECK(d.co.contains(ix, 1));
  CHECK(d.co.contains(1, 0));
  CHECK_FALSE(d.co.contains(0, 1));
}

TEST_CASE("witness paths for every valid candidate of the Power tests") {
  for (const auto& e : corpus()) {
    if (e.prog->arch != Arch::Power) continue;
    for (const auto& c : build_candidates(e.prog)) {
      Verdict v = eval_model(power(), c);
      MachineContext ctx = machine_context(c, power());
      if (v.allowed) {
        Path path = witness_path(c, ctx);
        CHECK_MESSAGE(run_path(*e.prog, path, ctx).accepted, e.test.name << ": " << path_string(*e.prog, path));
        Derived d = derive_from_path(*e.prog, path);
        CHECK_MESSAGE(d.co == c.co, e.test.name);
        CHECK_MESSAGE(d.rf == c.rf, e.test.name);
      } else {
        // an invalid candidate has no accepted linearisation of its constraints
        try {
          Path path = witness_path(c, ctx);
          CHECK_FALSE_MESSAGE(run_path(*e.prog, path, ctx).accepted, e.test.name);
        } catch (const WitnessError&) {
        }
      }
    }
  }
}

TEST_CASE("behaviour sets agree with the axiomatic model") {
  for (const char* name : {"mp", "sb", "lb", "coRR", "coRW2", "mp+lwsync+addr", "lb+addrs", "sb+syncs"}) {
    auto p = prog(name);
    CHECK_MESSAGE(enumerate_accepted(p, power()) == axiomatic_behaviours(p, power()), name);
  }
}

TEST_CASE("without the read propagation premises the machine is too permissive") {
  auto p = prog("sb+syncs");
  MachineOptions literal;
  literal.prop_reads = false;
  auto loose = enumerate_accepted(p, power(), 8, {}, literal);
  auto ax = axiomatic_behaviours(p, power());
  CHECK(loose.size() == ax.size() + 1);
}

TEST_CASE("bound and empty programs") {
  CHECK_THROWS_AS(enumerate_accepted(prog("iriw"), power(), 4), BoundExceeded);
  auto empty = build_program(parse_litmus("empty Power\ninit { x=0; }\nthread T0 {\n}\nfinal exists (x=0)\n"));
  auto b = enumerate_accepted(empty, power());
  REQUIRE(b.size() == 1);
  CHECK(b.begin()->state == "x=0;");
  CHECK(b == axiomatic_behaviours(empty, power()));
}
