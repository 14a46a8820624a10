#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "memcat/relation.hpp"

namespace memcat {

struct LitmusTest;

enum class Arch { SC, TSO, Power, ARM, Generic };
std::string arch_name(Arch a);

// Memory events of a test after projection. Program events come first
// (thread-major, po order), then one init write per location.
struct Program {
  std::shared_ptr<const LitmusTest> test;
  Arch arch = Arch::Generic;
  std::vector<std::string> locations;
  std::vector<Event> events;
  std::size_t n_program = 0;
  int nthreads = 0;
  std::vector<EventId> init_write;  // indexed by location

  Relation po, po_loc, addr, data, ctrl, ctrl_cfence;
  std::map<FenceKind, Relation> fences;

  // memory event produced by instruction i of thread t, or -1
  std::vector<std::vector<int>> mem_of_instr;

  std::size_t size() const { return events.size(); }
  std::string event_name(EventId e) const;
  std::vector<EventId> reads() const;
  std::vector<EventId> writes_to(int loc) const;  // init write first
};

struct Candidate {
  std::shared_ptr<const Program> prog;
  Relation rf, co;
  Relation fr, com, rfe, rfi, coe, coi, fre, fri;
  std::vector<int> values;  // write values and filled read value-slots

  const std::vector<Event>& events() const { return prog->events; }
  std::size_t size() const { return prog->events.size(); }
  EventId rf_source(EventId r) const;
  EventId co_last(int loc) const;
};

// Fills the derived relations and read values; throws on malformed rf/co.
Candidate make_candidate(std::shared_ptr<const Program> prog, Relation rf, Relation co);

// Empty string when the Candidate invariants hold, else a description.
std::string check_wellformed(const Candidate& c);

}  // namespace memcat
