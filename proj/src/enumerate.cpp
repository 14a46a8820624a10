#include "memcat/enumerate.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace memcat {

std::vector<Relation> enumerate_rf(const Program& prog) {
  std::size_t n = prog.size();
  auto reads = prog.reads();
  std::vector<std::vector<EventId>> options;
  for (EventId r : reads) options.push_back(prog.writes_to(prog.events[r].loc));
  std::vector<Relation> out;
  std::vector<std::size_t> idx(reads.size(), 0);
  while (true) {
    Relation rf(n);
    for (std::size_t k = 0; k < reads.size(); ++k) rf.add(options[k][idx[k]], reads[k]);
    out.push_back(std::move(rf));
    // increment, last read fastest
    std::size_t k = reads.size();
    while (k > 0) {
      --k;
      if (++idx[k] < options[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (reads.empty()) return out;
  }
}

std::vector<Relation> enumerate_co(const Program& prog) {
  std::size_t n = prog.size();
  std::vector<std::vector<std::vector<EventId>>> perms;  // per location
  for (std::size_t l = 0; l < prog.locations.size(); ++l) {
    auto ws = prog.writes_to(static_cast<int>(l));
    std::vector<EventId> prog_ws(ws.begin() + 1, ws.end());
    std::vector<std::vector<EventId>> ps;
    do ps.push_back(prog_ws);
    while (std::next_permutation(prog_ws.begin(), prog_ws.end()));
    perms.push_back(std::move(ps));
  }
  std::vector<Relation> out;
  std::vector<std::size_t> idx(perms.size(), 0);
  while (true) {
    Relation co(n);
    for (std::size_t l = 0; l < perms.size(); ++l) {
      std::vector<EventId> chain{prog.init_write[l]};
      const auto& p = perms[l][idx[l]];
      chain.insert(chain.end(), p.begin(), p.end());
      for (std::size_t a = 0; a < chain.size(); ++a)
        for (std::size_t b = a + 1; b < chain.size(); ++b) co.add(chain[a], chain[b]);
    }
    out.push_back(std::move(co));
    std::size_t l = perms.size();
    if (l == 0) return out;
    while (true) {
      --l;
      if (++idx[l] < perms[l].size()) break;
      idx[l] = 0;
      if (l == 0) return out;
    }
  }
}

CandidateStream::CandidateStream(std::shared_ptr<const Program> prog, bool prune)
    : prog_(std::move(prog)), prune_(prune), rfs_(enumerate_rf(*prog_)), cos_(enumerate_co(*prog_)) {}

std::optional<Candidate> CandidateStream::next() {
  while (co_i_ < cos_.size()) {
    Candidate c = make_candidate(prog_, rfs_[rf_i_], cos_[co_i_]);
    if (++rf_i_ == rfs_.size()) {
      rf_i_ = 0;
      ++co_i_;
    }
    ++total_;
    if (prune_ && !sc_per_location_holds(c)) continue;
    ++well_formed_;
    return c;
  }
  return std::nullopt;
}

std::vector<Candidate> build_candidates(std::shared_ptr<const Program> prog, bool prune) {
  CandidateStream s(std::move(prog), prune);
  std::vector<Candidate> out;
  while (auto c = s.next()) out.push_back(std::move(*c));
  return out;
}

bool sc_per_location_holds(const Candidate& c) {
  return check_acyclic(c.prog->po_loc | c.com).ok;
}

std::string state_string(const State& s) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : s) {
    os << (first ? "" : " ") << k << "=" << v << ";";
    first = false;
  }
  return os.str();
}

State final_state(const Candidate& c) {
  const Program& p = *c.prog;
  State s;
  auto regs = final_registers(p, c.values);
  for (std::size_t t = 0; t < p.test->threads.size(); ++t)
    for (const auto& in : p.test->threads[t])
      if (in.kind == Instruction::Kind::Load) {
        const Value& v = regs[t][in.dst];
        if (v.kind == Value::Kind::Int) s["T" + std::to_string(t) + ":" + in.dst] = v.v;
      }
  for (std::size_t l = 0; l < p.locations.size(); ++l)
    s[p.locations[l]] = c.values[c.co_last(static_cast<int>(l))];
  return s;
}

namespace {

bool eval_cond(const Cond& k, const Candidate& c, const std::vector<std::map<std::string, Value>>& regs) {
  switch (k.kind) {
    case Cond::Kind::True: return true;
    case Cond::Kind::RegEq: {
      if (k.thread < 0 || k.thread >= static_cast<int>(regs.size()))
        throw std::runtime_error("unknown thread in final condition");
      auto it = regs[k.thread].find(k.name);
      if (it == regs[k.thread].end())
        throw std::runtime_error("unknown register T" + std::to_string(k.thread) + ":" + k.name);
      return it->second.kind == Value::Kind::Int && it->second.v == k.value;
    }
    case Cond::Kind::LocEq: {
      const auto& locs = c.prog->locations;
      auto it = std::find(locs.begin(), locs.end(), k.name);
      if (it == locs.end()) throw std::runtime_error("unknown location " + k.name);
      return c.values[c.co_last(static_cast<int>(it - locs.begin()))] == k.value;
    }
    case Cond::Kind::Not: return !eval_cond(k.kids[0], c, regs);
    case Cond::Kind::And:
      for (const auto& x : k.kids)
        if (!eval_cond(x, c, regs)) return false;
      return true;
    case Cond::Kind::Or:
      for (const auto& x : k.kids)
        if (eval_cond(x, c, regs)) return true;
      return false;
  }
  return false;
}

}  // namespace

bool evaluate_final(const Candidate& c, const Cond& clause) {
  return eval_cond(clause, c, final_registers(*c.prog, c.values));
}

}  // namespace memcat
