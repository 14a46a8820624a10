#include "memcat/candidate.hpp"

#include <stdexcept>

namespace memcat {

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::SC: return "SC";
    case Arch::TSO: return "TSO";
    case Arch::Power: return "Power";
    case Arch::ARM: return "ARM";
    case Arch::Generic: return "generic";
  }
  return "?";
}

std::string Program::event_name(EventId e) const {
  const Event& ev = events[e];
  if (ev.is_init()) return "i" + locations[ev.loc];
  if (e < 26) return std::string(1, static_cast<char>('a' + e));
  return "e" + std::to_string(e);
}

std::vector<EventId> Program::reads() const {
  std::vector<EventId> out;
  for (const Event& e : events)
    if (e.is_read()) out.push_back(e.id);
  return out;
}

std::vector<EventId> Program::writes_to(int loc) const {
  std::vector<EventId> out{init_write[loc]};
  for (const Event& e : events)
    if (e.is_write() && !e.is_init() && e.loc == loc) out.push_back(e.id);
  return out;
}

EventId Candidate::rf_source(EventId r) const {
  for (EventId w = 0; w < size(); ++w)
    if (rf.contains(w, r)) return w;
  throw std::logic_error("read without rf source");
}

EventId Candidate::co_last(int loc) const {
  for (EventId w : prog->writes_to(loc))
    if (!co.has_successor(w)) return w;
  throw std::logic_error("co has no maximum");
}

Candidate make_candidate(std::shared_ptr<const Program> prog, Relation rf, Relation co) {
  Candidate c;
  c.prog = std::move(prog);
  c.rf = std::move(rf);
  c.co = std::move(co);
  const auto& ev = c.prog->events;
  if (c.rf.size() != ev.size() || c.co.size() != ev.size())
    throw std::invalid_argument("candidate: relation universe mismatch");
  c.fr = derive_fr(c.rf, c.co);
  c.com = c.co | c.rf | c.fr;
  auto s = split_scope(c.rf, ev);
  c.rfi = s.internal;
  c.rfe = s.external;
  s = split_scope(c.co, ev);
  c.coi = s.internal;
  c.coe = s.external;
  s = split_scope(c.fr, ev);
  c.fri = s.internal;
  c.fre = s.external;
  c.values.resize(ev.size());
  for (const Event& e : ev) c.values[e.id] = e.value;
  for (auto [w, r] : c.rf.pairs()) c.values[r] = ev[w].value;
  return c;
}

std::string check_wellformed(const Candidate& c) {
  const auto& ev = c.events();
  std::size_t n = ev.size();
  for (EventId r = 0; r < n; ++r) {
    if (!ev[r].is_read()) continue;
    int srcs = 0;
    for (EventId w = 0; w < n; ++w) {
      if (!c.rf.contains(w, r)) continue;
      ++srcs;
      if (!ev[w].is_write() || ev[w].loc != ev[r].loc) return "rf endpoints disagree";
      if (c.values[r] != ev[w].value) return "rf value mismatch";
    }
    if (srcs != 1) return "read " + c.prog->event_name(r) + " has " + std::to_string(srcs) + " rf sources";
  }
  for (auto [a, b] : c.rf.pairs())
    if (!ev[b].is_read()) return "rf target is not a read";
  for (auto [a, b] : c.co.pairs())
    if (!ev[a].is_write() || !ev[b].is_write() || ev[a].loc != ev[b].loc) return "co relates non-comparable events";
  if (!check_irreflexive(c.co).ok || !(compose(c.co, c.co).subset_of(c.co))) return "co is not a strict order";
  for (std::size_t loc = 0; loc < c.prog->locations.size(); ++loc) {
    auto ws = c.prog->writes_to(static_cast<int>(loc));
    for (EventId a : ws)
      for (EventId b : ws)
        if (a != b && !c.co.contains(a, b) && !c.co.contains(b, a)) return "co is not total";
    EventId init = c.prog->init_write[loc];
    for (EventId w : ws)
      if (w != init && !c.co.contains(init, w)) return "init write is not co-minimal";
  }
  return "";
}

}  // namespace memcat
