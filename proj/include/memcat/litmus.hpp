#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"
#include "memcat/relation.hpp"

namespace memcat {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line, col;
};

struct Instruction {
  enum class Kind { MovConst, Load, Store, Xor, Add, Cmp, Branch, Fence, LabelDef };
  Kind kind = Kind::Fence;
  std::string dst;                // MovConst, Load, Xor, Add
  std::vector<std::string> addr;  // Load, Store: base (register or location), optional offset register
  std::string src;                // Store value: register, or empty when imm is used
  std::string src1, src2;         // Xor, Add; Cmp uses src1
  long imm = 0;                   // MovConst, Cmp, Store immediate
  std::string label;              // Branch, LabelDef
  std::string cond = "bne";       // Branch mnemonic
  FenceKind fence = FenceKind::Sync;
  int line = 0;
};

struct RegInit {
  int thread = -1;  // -1: every thread
  std::string reg;
  bool is_addr = false;
  std::string loc;
  long value = 0;
};

struct Cond {
  enum class Kind { True, RegEq, LocEq, And, Or, Not };
  Kind kind = Kind::True;
  int thread = 0;
  std::string name;  // register or location
  long value = 0;
  std::vector<Cond> kids;
};

struct FinalCondition {
  enum class Quantifier { Exists, NotExists, Forall, Observed };
  Quantifier quantifier = Quantifier::Observed;
  Cond clause;
};

struct LitmusTest {
  std::string name;
  Arch arch = Arch::Generic;
  std::vector<std::pair<std::string, long>> mem_init;
  std::vector<RegInit> reg_init;
  std::vector<std::vector<Instruction>> threads;
  FinalCondition final;
  std::vector<std::pair<std::string, std::string>> expect;  // model, allowed|forbidden
  std::vector<std::string> warnings;

  std::vector<std::string> locations() const;
  int memory_accesses() const;
};

bool is_register(const std::string& s);
bool fence_in_arch(FenceKind k, Arch a);
std::optional<Arch> parse_arch(const std::string& s);

LitmusTest parse_litmus(const std::string& text);
LitmusTest load_litmus_file(const std::string& path);
std::string print_litmus(const LitmusTest& t);
std::string print_instruction(const Instruction& i);
std::string print_cond(const Cond& c);

struct EventStructure {
  std::vector<Event> events;
  std::vector<std::string> locations;
  int nthreads = 0;
  Relation po, iico, rf_reg;
};

EventStructure elaborate(const LitmusTest& test);

struct Dependencies {
  Relation dd_reg, addr, data, ctrl, ctrl_cfence;  // over all events of the structure
};
Dependencies compute_dependencies(const EventStructure& es);

Program project(const EventStructure& es, const Dependencies& deps);

// parse result -> projected program, keeping the test alive in the program
std::shared_ptr<const Program> build_program(const LitmusTest& test);

// Static value of a register during elaboration and final evaluation.
struct Value {
  enum class Kind { Int, Addr, Unknown };
  Kind kind = Kind::Unknown;
  long v = 0;
  int loc = -1;
  bool operator==(const Value&) const = default;
};

// Final register file per thread under a candidate's read values.
std::vector<std::map<std::string, Value>> final_registers(const Program& prog,
                                                          const std::vector<int>& values);

}  // namespace memcat
