#pragma once

#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"
#include "memcat/cat.hpp"

namespace memcat {

struct Label {
  enum class Kind { CommitWrite, CoherencePoint, SatisfyRead, CommitRead };
  Kind kind = Kind::CommitWrite;
  EventId w = 0;
  EventId r = 0;  // reads only
  bool operator==(const Label&) const = default;
};
using Path = std::vector<Label>;

std::string label_string(const Program& p, const Label& l);
std::string path_string(const Program& p, const Path& path);

struct MachineOptions {
  bool corr = true;        // cr records (w,r) pairs so that visible() rejects coRR
  bool prop_reads = true;  // prop edges leaving or reaching reads also order the labels
};

// Relations the machine consults, all derived from the candidate the path denotes.
struct MachineContext {
  Relation po_loc, ppo, fences, prop, hb, co, rf;
  Relation ppo_fences;  // ppo | fences
  Relation prop_hb;     // prop;hb*
  bool corr = true;
  bool prop_reads = true;
};

MachineContext machine_context(const Candidate& c, const ModelAst& model, const EvalOptions& opts = {},
                               const MachineOptions& mopts = {});

struct MachineState {
  std::vector<bool> buff;  // committed writes
  std::vector<EventId> rcp;
  std::vector<bool> in_rcp;
  std::vector<bool> sr;
  std::vector<bool> cr;
  std::vector<std::pair<EventId, EventId>> cr_pairs;
};

// init writes start committed and past their coherence point
MachineState initial_state(const Program& p);

struct StepResult {
  bool ok = true;
  std::string premise;  // identifier of the violated premise
};
StepResult step(MachineState& s, const Label& l, const MachineContext& ctx, const Program& p);

class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Derived {
  Relation co, rf;
};
// throws PathError on a malformed path or a value mismatch
Derived derive_from_path(const Program& p, const Path& path);

struct AcceptResult {
  bool accepted = true;
  std::size_t blocked_at = 0;
  std::string premise;
  std::vector<std::string> trace;  // one line per step
};
AcceptResult run_path(const Program& p, const Path& path, const MachineContext& ctx);
// derives co/rf from the path, builds the context with the model, then runs it
AcceptResult accepts(std::shared_ptr<const Program> p, const Path& path, const ModelAst& model,
                     const EvalOptions& opts = {}, const MachineOptions& mopts = {});

class WitnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// linearises the constraint relation r with the fifo condition; throws WitnessError on a cycle
Path witness_path(const Candidate& c, const MachineContext& ctx);

struct Behaviour {
  std::vector<std::pair<EventId, EventId>> rf;
  std::string state;
  auto operator<=>(const Behaviour&) const = default;
};

class BoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MachineStats {
  std::size_t candidates = 0;
  std::size_t explored_states = 0;
};

std::set<Behaviour> enumerate_accepted(std::shared_ptr<const Program> p, const ModelAst& model,
                                       std::size_t bound = 8, const EvalOptions& opts = {},
                                       const MachineOptions& mopts = {}, MachineStats* stats = nullptr);
std::set<Behaviour> axiomatic_behaviours(std::shared_ptr<const Program> p, const ModelAst& model,
                                         const EvalOptions& opts = {});

}  // namespace memcat
