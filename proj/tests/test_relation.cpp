#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "memcat/relation.hpp"

using namespace memcat;

namespace {

using PairSet = std::set<std::pair<EventId, EventId>>;

PairSet as_set(const Relation& r) {
  auto ps = r.pairs();
  return {ps.begin(), ps.end()};
}

Relation random_relation(std::mt19937& rng, std::size_t n, double density) {
  std::bernoulli_distribution coin(density);
  Relation r(n);
  for (EventId a = 0; a < n; ++a)
    for (EventId b = 0; b < n; ++b)
      if (coin(rng)) r.add(a, b);
  return r;
}

// set-based composition
PairSet naive_compose(const PairSet& a, const PairSet& b) {
  PairSet out;
  for (auto [x, y] : a)
    for (auto [y2, z] : b)
      if (y == y2) out.insert({x, z});
  return out;
}

// closure by repeated union with self-composition until stable
PairSet naive_closure(PairSet r) {
  while (true) {
    PairSet next = r;
    for (auto p : naive_compose(r, r)) next.insert(p);
    if (next == r) return r;
    r = next;
  }
}

// a relation is acyclic iff repeatedly removing sinks empties it
bool naive_acyclic(const PairSet& r, std::size_t n) {
  std::set<EventId> alive;
  for (EventId i = 0; i < n; ++i) alive.insert(i);
  bool changed = true;
  while (changed) {
    changed = false;
    for (EventId v : std::set<EventId>(alive)) {
      bool has_out = false;
      for (auto [a, b] : r)
        if (a == v && alive.count(b)) has_out = true;
      if (!has_out) {
        alive.erase(v);
        changed = true;
      }
    }
  }
  return alive.empty();
}

}  // namespace

TEST_CASE("basic membership and algebra") {
  Relation r(3);
  CHECK(r.empty());
  r.add(0, 1);
  r.add(1, 2);
  CHECK(r.contains(0, 1));
  CHECK_FALSE(r.contains(1, 0));
  CHECK(r.count() == 2);
  Relation c = compose(r, r);
  CHECK(c.pairs() == std::vector<std::pair<EventId, EventId>>{{0, 2}});
  CHECK(r.inverse().contains(2, 1));
  CHECK((r - r).empty());
  CHECK(closure(r, false).contains(0, 2));
  CHECK(closure(r, true).contains(1, 1));
}

TEST_CASE("compose rejects mismatched universes") {
  CHECK_THROWS_AS(compose(Relation(2), Relation(3)), std::invalid_argument);
}

TEST_CASE("relations wider than one word") {
  Relation r(130);
  r.add(0, 129);
  r.add(129, 64);
  CHECK(compose(r, r).contains(0, 64));
  CHECK(check_acyclic(r).ok);
  r.add(64, 0);
  auto res = check_acyclic(r);
  CHECK_FALSE(res.ok);
  CHECK(res.cycle.size() == 3);
}

TEST_CASE("cycle witness is a real cycle") {
  Relation r = Relation::from_pairs(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}});
  auto res = check_acyclic(r);
  REQUIRE_FALSE(res.ok);
  for (std::size_t i = 0; i < res.cycle.size(); ++i)
    CHECK(r.contains(res.cycle[i], res.cycle[(i + 1) % res.cycle.size()]));
}

TEST_CASE("topological sort") {
  Relation r = Relation::from_pairs(4, {{2, 0}, {0, 1}});
  auto order = topo_sort(r);
  REQUIRE(order);
  CHECK(*order == std::vector<EventId>{2, 0, 1, 3});
  r.add(1, 2);
  CHECK_FALSE(topo_sort(r));
}

TEST_CASE("restrict, fr and scope split") {
  std::vector<Event> ev(4);
  ev[0] = {0, 0, 0, Action::MemWrite, 0};
  ev[1] = {1, 1, 0, Action::MemRead, 0};
  ev[2] = {2, 1, 1, Action::MemWrite, 0};
  ev[3] = {3, kInitThread, 0, Action::MemWrite, 0};
  Relation rf = Relation::from_pairs(4, {{3, 1}});
  Relation co = Relation::from_pairs(4, {{3, 0}, {3, 2}, {0, 2}});
  Relation fr = derive_fr(rf, co);
  CHECK(as_set(fr) == PairSet{{1, 0}, {1, 2}});
  auto s = split_scope(fr, ev);
  CHECK(as_set(s.internal) == PairSet{{1, 2}});
  CHECK(as_set(s.external) == PairSet{{1, 0}});
  // init writes are external to every thread
  CHECK(split_scope(rf, ev).external.contains(3, 1));
  Relation all = Relation::from_pairs(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(as_set(restrict(all, ev, Dir::W, Dir::R)) == PairSet{{0, 1}});
  CHECK(as_set(restrict(all, ev, Dir::R, Dir::M)) == PairSet{{1, 2}});
}

TEST_CASE("fence names round-trip") {
  for (FenceKind k : kAllFences) CHECK(parse_fence(fence_name(k)) == k);
  CHECK_FALSE(parse_fence("nop"));
}

TEST_CASE("randomized algebra laws against a set-based oracle") {
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  std::uniform_real_distribution<double> dens(0.05, 0.5);
  for (int it = 0; it < 1000; ++it) {
    std::size_t n = size(rng);
    Relation a = random_relation(rng, n, dens(rng));
    Relation b = random_relation(rng, n, dens(rng));
    Relation c = random_relation(rng, n, dens(rng));
    // oracle agreement
    CHECK(as_set(compose(a, b)) == naive_compose(as_set(a), as_set(b)));
    CHECK(as_set(closure(a, false)) == naive_closure(as_set(a)));
    CHECK(check_acyclic(a).ok == naive_acyclic(as_set(a), n));
    // associativity and distributivity
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    CHECK(compose(a, b | c) == (compose(a, b) | compose(a, c)));
    CHECK(((a | b) | c) == (a | (b | c)));
    // idempotence
    CHECK((a | a) == a);
    CHECK((a & a) == a);
    Relation p = closure(a, false);
    CHECK(closure(p, false) == p);
    CHECK(compose(p, p).subset_of(p));
    CHECK(a.subset_of(p));
    // reflexive closure adds exactly the identity
    CHECK(closure(a, true) == (p | Relation::identity(n)));
    // acyclic(r) iff irreflexive(r+)
    CHECK(check_acyclic(a).ok == check_irreflexive(p).ok);
    // topo sort exists iff acyclic, and respects every edge
    auto order = topo_sort(a);
    CHECK(order.has_value() == check_acyclic(a).ok);
    if (order) {
      std::vector<std::size_t> pos(n);
      for (std::size_t i = 0; i < n; ++i) pos[(*order)[i]] = i;
      for (auto [x, y] : a.pairs()) CHECK(pos[x] < pos[y]);
    }
    CHECK(a.inverse().inverse() == a);
    CHECK(compose(a, b).inverse() == compose(b.inverse(), a.inverse()));
  }
}
