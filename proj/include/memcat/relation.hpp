#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memcat {

using EventId = std::uint32_t;

// Dense binary relation over 0..N-1, one bit row per source.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n);

  static Relation identity(std::size_t n);
  static Relation from_pairs(std::size_t n,
                             const std::vector<std::pair<EventId, EventId>>& ps);

  std::size_t size() const { return n_; }
  bool contains(EventId a, EventId b) const {
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1u;
  }
  void add(EventId a, EventId b) { bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64); }
  void remove(EventId a, EventId b) {
    bits_[a * words_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
  }

  bool empty() const;
  std::size_t count() const;
  std::vector<std::pair<EventId, EventId>> pairs() const;
  std::vector<EventId> successors(EventId a) const;
  bool has_successor(EventId a) const;

  Relation inverse() const;
  Relation operator|(const Relation& o) const;
  Relation operator&(const Relation& o) const;
  Relation operator-(const Relation& o) const;
  Relation& operator|=(const Relation& o);
  Relation& operator&=(const Relation& o);
  bool operator==(const Relation& o) const { return n_ == o.n_ && bits_ == o.bits_; }
  bool subset_of(const Relation& o) const;

  // rows as raw words, for callers doing their own bit loops
  const std::uint64_t* row(EventId a) const { return bits_.data() + a * words_; }
  std::uint64_t* row(EventId a) { return bits_.data() + a * words_; }
  std::size_t words() const { return words_; }

  std::string to_string() const;

 private:
  void same_universe(const Relation& o) const;

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

Relation compose(const Relation& r1, const Relation& r2);
Relation closure(const Relation& r, bool reflexive);

struct AcyclicResult {
  bool ok = true;
  std::vector<EventId> cycle;
};
AcyclicResult check_acyclic(const Relation& r);

struct IrreflexiveResult {
  bool ok = true;
  EventId witness = 0;
};
IrreflexiveResult check_irreflexive(const Relation& r);

// Topological order of a DAG; nullopt when r has a cycle.
std::optional<std::vector<EventId>> topo_sort(const Relation& r);

enum class Dir { R, W, M, B, F };

enum class FenceKind { Sync, Lwsync, Eieio, Isync, Mfence, Dmb, Dsb, DmbSt, DsbSt, Isb };
inline constexpr FenceKind kAllFences[] = {FenceKind::Sync,  FenceKind::Lwsync, FenceKind::Eieio,
                                           FenceKind::Isync, FenceKind::Mfence, FenceKind::Dmb,
                                           FenceKind::Dsb,   FenceKind::DmbSt,  FenceKind::DsbSt,
                                           FenceKind::Isb};
std::string fence_name(FenceKind k);
std::optional<FenceKind> parse_fence(const std::string& s);

enum class Action { MemRead, MemWrite, RegRead, RegWrite, Branch, Fence };
enum class Port { None, Address, Value, Test };

inline constexpr int kInitThread = -1;

struct Event {
  EventId id = 0;
  int thread = 0;
  int po_index = 0;
  Action action = Action::MemRead;
  int loc = -1;        // memory location index
  int value = 0;       // MemWrite value, MemRead value-slot
  std::string reg;     // RegRead / RegWrite
  Port port = Port::None;
  FenceKind fence = FenceKind::Sync;
  int origin = -1;     // instruction index within its thread

  bool is_read() const { return action == Action::MemRead; }
  bool is_write() const { return action == Action::MemWrite; }
  bool is_mem() const { return is_read() || is_write(); }
  bool is_init() const { return thread == kInitThread; }
};

bool matches(const Event& e, Dir d);
Relation restrict(const Relation& r, const std::vector<Event>& events, Dir src, Dir tgt);

Relation derive_fr(const Relation& rf, const Relation& co);

struct Split {
  Relation internal;
  Relation external;
};
Split split_scope(const Relation& r, const std::vector<Event>& events);

}  // namespace memcat
