#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"

namespace memcat {

struct StaticAccess {
  int thread = 0;
  int po_index = 0;  // rank among the memory accesses of its thread
  Dir dir = Dir::R;  // R or W
  int loc = 0;
  std::vector<FenceKind> fences_before;  // fences since the previous access of the thread
  std::string dep_to_next;              // dependency to the next access of the thread, or ""
};

struct StaticProgram {
  std::string name;
  Arch arch = Arch::Generic;
  std::vector<std::string> locations;
  std::vector<StaticAccess> accesses;
  // annotation of the po edge between two accesses of one thread: fence or dependency name, or ""
  std::map<std::pair<int, int>, std::string> po_annot;
};

StaticProgram static_program(const Program& p);

struct CycleEdge {
  enum class Kind { Po, Rf, Fr, Co };
  Kind kind = Kind::Po;
  bool external = true;  // com edges only
  std::string annot;     // po edges: fence or dependency name
  bool operator==(const CycleEdge&) const = default;
};

// accesses[i] --edges[i]--> accesses[(i+1) % n]
struct LabeledCycle {
  std::vector<int> accesses;  // indices into StaticProgram::accesses
  std::vector<CycleEdge> edges;
  std::optional<std::string> shape;  // sc-per-location shape name, e.g. coRW2
  bool operator==(const LabeledCycle&) const = default;
};

std::string edge_string(const StaticProgram& sp, const LabeledCycle& c, std::size_t i);
std::string cycle_string(const StaticProgram& sp, const LabeledCycle& c);

// both conditions of a critical cycle, checked verbatim
bool condition_i(const StaticProgram& sp, const LabeledCycle& c);
bool condition_ii(const StaticProgram& sp, const LabeledCycle& c);

// Critical cycles of the po | cmp graph, reduced and deduplicated, followed by the
// sc-per-location shapes the program contains.
std::vector<LabeledCycle> find_critical_cycles(const StaticProgram& sp);
// Raw elementary cycles passing the filters, before reduction.
std::vector<LabeledCycle> raw_critical_cycles(const StaticProgram& sp);
std::vector<LabeledCycle> sc_per_location_cycles(const StaticProgram& sp);

// co;co -> co, rf;fr -> co, fr;co -> fr until none applies; the rule applied at each
// step is chosen by rng when given, else leftmost first
LabeledCycle reduce_cycle(const StaticProgram& sp, LabeledCycle c, std::mt19937* rng = nullptr);

struct PatternName {
  std::string systematic;
  std::optional<std::string> classic;
  std::string full;  // classic (or systematic) name with fence and dependency suffixes
};
PatternName name_pattern(const StaticProgram& sp, const LabeledCycle& c);

enum class Axiom { ScPerLocation, NoThinAir, Observation, Propagation };
std::string axiom_name(Axiom a);
Axiom classify(const StaticProgram& sp, const LabeledCycle& c);

struct CycleRecord {
  std::string test;
  PatternName name;
  Axiom axiom;
  std::string sequence;
  std::vector<StaticAccess> accesses;
  std::vector<std::string> locations;
};
std::vector<CycleRecord> mine(const Program& p);

}  // namespace memcat
