#include "memcat/relation.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace memcat {

Relation::Relation(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

Relation Relation::identity(std::size_t n) {
  Relation r(n);
  for (EventId i = 0; i < n; ++i) r.add(i, i);
  return r;
}

Relation Relation::from_pairs(std::size_t n,
                              const std::vector<std::pair<EventId, EventId>>& ps) {
  Relation r(n);
  for (auto [a, b] : ps) {
    if (a >= n || b >= n) throw std::out_of_range("relation pair outside universe");
    r.add(a, b);
  }
  return r;
}

void Relation::same_universe(const Relation& o) const {
  if (n_ != o.n_)
    throw std::invalid_argument("relation universe mismatch: " + std::to_string(n_) + " vs " +
                                std::to_string(o.n_));
}

bool Relation::empty() const {
  for (auto w : bits_)
    if (w) return false;
  return true;
}

std::size_t Relation::count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += std::popcount(w);
  return c;
}

std::vector<std::pair<EventId, EventId>> Relation::pairs() const {
  std::vector<std::pair<EventId, EventId>> out;
  for (EventId a = 0; a < n_; ++a)
    for (EventId b : successors(a)) out.emplace_back(a, b);
  return out;
}

std::vector<EventId> Relation::successors(EventId a) const {
  std::vector<EventId> out;
  const std::uint64_t* r = row(a);
  for (std::size_t w = 0; w < words_; ++w) {
    std::uint64_t bits = r[w];
    while (bits) {
      int t = std::countr_zero(bits);
      out.push_back(static_cast<EventId>(w * 64 + t));
      bits &= bits - 1;
    }
  }
  return out;
}

bool Relation::has_successor(EventId a) const {
  const std::uint64_t* r = row(a);
  for (std::size_t w = 0; w < words_; ++w)
    if (r[w]) return true;
  return false;
}

Relation Relation::inverse() const {
  Relation out(n_);
  for (auto [a, b] : pairs()) out.add(b, a);
  return out;
}

Relation Relation::operator|(const Relation& o) const {
  Relation out = *this;
  out |= o;
  return out;
}

Relation Relation::operator&(const Relation& o) const {
  Relation out = *this;
  out &= o;
  return out;
}

Relation Relation::operator-(const Relation& o) const {
  same_universe(o);
  Relation out = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] &= ~o.bits_[i];
  return out;
}

Relation& Relation::operator|=(const Relation& o) {
  same_universe(o);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

Relation& Relation::operator&=(const Relation& o) {
  same_universe(o);
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
  return *this;
}

bool Relation::subset_of(const Relation& o) const {
  same_universe(o);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~o.bits_[i]) return false;
  return true;
}

std::string Relation::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto [a, b] : pairs()) {
    os << (first ? "" : ", ") << "(" << a << "," << b << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

Relation compose(const Relation& r1, const Relation& r2) {
  if (r1.size() != r2.size())
    throw std::invalid_argument("compose: universe mismatch");
  std::size_t n = r1.size(), words = r1.words();
  Relation out(n);
  for (EventId a = 0; a < n; ++a) {
    std::uint64_t* dst = out.row(a);
    for (EventId z : r1.successors(a)) {
      const std::uint64_t* src = r2.row(z);
      for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
    }
  }
  return out;
}

Relation closure(const Relation& r, bool reflexive) {
  Relation out = r;
  std::size_t n = r.size(), words = r.words();
  // Warshall over bit rows
  for (EventId k = 0; k < n; ++k) {
    const std::uint64_t* rk = out.row(k);
    for (EventId i = 0; i < n; ++i) {
      if (!out.contains(i, k)) continue;
      std::uint64_t* ri = out.row(i);
      for (std::size_t w = 0; w < words; ++w) ri[w] |= rk[w];
    }
  }
  if (reflexive)
    for (EventId i = 0; i < n; ++i) out.add(i, i);
  return out;
}

AcyclicResult check_acyclic(const Relation& r) {
  std::size_t n = r.size();
  std::vector<int> colour(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<EventId> stack;
  AcyclicResult res;

  std::vector<std::pair<EventId, std::vector<EventId>>> frames;
  for (EventId s = 0; s < n; ++s) {
    if (colour[s]) continue;
    frames.clear();
    stack.clear();
    frames.emplace_back(s, r.successors(s));
    colour[s] = 1;
    stack.push_back(s);
    while (!frames.empty()) {
      auto& [v, succ] = frames.back();
      if (succ.empty()) {
        colour[v] = 2;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      EventId w = succ.back();
      succ.pop_back();
      if (colour[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        res.ok = false;
        res.cycle.assign(it, stack.end());
        return res;
      }
      if (colour[w] == 0) {
        colour[w] = 1;
        stack.push_back(w);
        frames.emplace_back(w, r.successors(w));
      }
    }
  }
  return res;
}

IrreflexiveResult check_irreflexive(const Relation& r) {
  for (EventId i = 0; i < r.size(); ++i)
    if (r.contains(i, i)) return {false, i};
  return {};
}

std::optional<std::vector<EventId>> topo_sort(const Relation& r) {
  std::size_t n = r.size();
  std::vector<int> indeg(n, 0);
  for (auto [a, b] : r.pairs()) ++indeg[b];
  std::vector<EventId> out;
  // smallest ready id first, so the order is deterministic
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    EventId pick = static_cast<EventId>(n);
    for (EventId i = 0; i < n; ++i)
      if (!done[i] && indeg[i] == 0) {
        pick = i;
        break;
      }
    if (pick == n) return std::nullopt;
    done[pick] = true;
    out.push_back(pick);
    for (EventId b : r.successors(pick)) --indeg[b];
  }
  return out;
}

std::string fence_name(FenceKind k) {
  switch (k) {
    case FenceKind::Sync: return "sync";
    case FenceKind::Lwsync: return "lwsync";
    case FenceKind::Eieio: return "eieio";
    case FenceKind::Isync: return "isync";
    case FenceKind::Mfence: return "mfence";
    case FenceKind::Dmb: return "dmb";
    case FenceKind::Dsb: return "dsb";
    case FenceKind::DmbSt: return "dmb.st";
    case FenceKind::DsbSt: return "dsb.st";
    case FenceKind::Isb: return "isb";
  }
  return "?";
}

std::optional<FenceKind> parse_fence(const std::string& s) {
  for (FenceKind k : kAllFences)
    if (fence_name(k) == s) return k;
  return std::nullopt;
}

bool matches(const Event& e, Dir d) {
  switch (d) {
    case Dir::R: return e.action == Action::MemRead;
    case Dir::W: return e.action == Action::MemWrite;
    case Dir::M: return e.is_mem();
    case Dir::B: return e.action == Action::Branch;
    case Dir::F: return e.action == Action::Fence;
  }
  return false;
}

Relation restrict(const Relation& r, const std::vector<Event>& events, Dir src, Dir tgt) {
  if (events.size() != r.size()) throw std::invalid_argument("restrict: universe mismatch");
  Relation out(r.size());
  for (auto [a, b] : r.pairs())
    if (matches(events[a], src) && matches(events[b], tgt)) out.add(a, b);
  return out;
}

Relation derive_fr(const Relation& rf, const Relation& co) {
  return compose(rf.inverse(), co);
}

Split split_scope(const Relation& r, const std::vector<Event>& events) {
  if (events.size() != r.size()) throw std::invalid_argument("split_scope: universe mismatch");
  Split s{Relation(r.size()), Relation(r.size())};
  for (auto [a, b] : r.pairs()) {
    if (events[a].thread == events[b].thread)
      s.internal.add(a, b);
    else
      s.external.add(a, b);
  }
  return s;
}

}  // namespace memcat
