#include "memcat/machine.hpp"

#include <map>
#include <sstream>

#include "memcat/enumerate.hpp"

namespace memcat {

std::string label_string(const Program& p, const Label& l) {
  switch (l.kind) {
    case Label::Kind::CommitWrite: return "c(" + p.event_name(l.w) + ")";
    case Label::Kind::CoherencePoint: return "cp(" + p.event_name(l.w) + ")";
    case Label::Kind::SatisfyRead: return "s(" + p.event_name(l.w) + "," + p.event_name(l.r) + ")";
    case Label::Kind::CommitRead: return "c(" + p.event_name(l.w) + "," + p.event_name(l.r) + ")";
  }
  return "?";
}

std::string path_string(const Program& p, const Path& path) {
  std::string out;
  for (const Label& l : path) {
    if (!out.empty()) out += ' ';
    out += label_string(p, l);
  }
  return out;
}

namespace {

const Relation& env_get(const Env& env, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (auto it = env.find(n); it != env.end()) return it->second;
  throw std::runtime_error(std::string("model does not bind '") + *names.begin() + "'");
}

}  // namespace

MachineContext machine_context(const Candidate& c, const ModelAst& model, const EvalOptions& opts,
                               const MachineOptions& mopts) {
  Evaluation ev = evaluate(model, c, opts);
  MachineContext ctx;
  ctx.po_loc = c.prog->po_loc;
  ctx.ppo = env_get(ev.env, {"ppo"});
  ctx.fences = env_get(ev.env, {"fence", "fences"});
  ctx.prop = env_get(ev.env, {"prop"});
  ctx.hb = env_get(ev.env, {"hb"});
  ctx.co = c.co;
  ctx.rf = c.rf;
  ctx.ppo_fences = ctx.ppo | ctx.fences;
  ctx.prop_hb = compose(ctx.prop, closure(ctx.hb, true));
  ctx.corr = mopts.corr;
  ctx.prop_reads = mopts.prop_reads;
  return ctx;
}

MachineState initial_state(const Program& p) {
  MachineState s;
  std::size_t n = p.size();
  s.buff.assign(n, false);
  s.in_rcp.assign(n, false);
  s.sr.assign(n, false);
  s.cr.assign(n, false);
  for (EventId w : p.init_write) {
    s.buff[w] = true;
    s.in_rcp[w] = true;
    s.rcp.push_back(w);
  }
  return s;
}

namespace {

bool any_in(const Relation& rel, EventId a, const std::vector<bool>& set) {
  for (EventId b : rel.successors(a))
    if (set[b]) return true;
  return false;
}

bool visible(const MachineState& s, EventId w, EventId r, const MachineContext& ctx, const Program& p) {
  const auto& ev = p.events;
  if (ev[w].loc != ev[r].loc) return false;
  // last po-loc-earlier write and first po-loc-later write
  std::optional<EventId> wb, wa;
  for (EventId e = 0; e < p.size(); ++e) {
    if (!ev[e].is_write()) continue;
    if (ctx.po_loc.contains(e, r) && (!wb || ctx.po_loc.contains(*wb, e))) wb = e;
    if (ctx.po_loc.contains(r, e) && (!wa || ctx.po_loc.contains(e, *wa))) wa = e;
  }
  if (wb && w != *wb && !ctx.co.contains(*wb, w)) return false;
  if (wa && !ctx.po_loc.contains(w, r) && !ctx.co.contains(w, *wa)) return false;
  if (ctx.corr) {
    for (auto [w2, r2] : s.cr_pairs) {
      if (ctx.po_loc.contains(r2, r) && ctx.co.contains(w, w2)) return false;
      if (ctx.po_loc.contains(r, r2) && ctx.co.contains(w2, w)) return false;
    }
  }
  return true;
}

StepResult blocked(const char* premise) { return {false, premise}; }

}  // namespace

StepResult step(MachineState& s, const Label& l, const MachineContext& ctx, const Program& p) {
  EventId w = l.w, r = l.r;
  switch (l.kind) {
    case Label::Kind::CommitWrite:
      if (any_in(ctx.po_loc, w, s.buff)) return blocked("cw:coWW");
      if (any_in(ctx.prop, w, s.buff)) return blocked("cw:propagation");
      if (any_in(ctx.fences, w, s.sr)) return blocked("cw:fences-WR");
      if (ctx.prop_reads && any_in(ctx.prop, w, s.sr)) return blocked("cw:prop-R");
      s.buff[w] = true;
      return {};
    case Label::Kind::CoherencePoint:
      if (!s.buff[w]) return blocked("cpw:committed");
      if (any_in(ctx.po_loc, w, s.in_rcp)) return blocked("cpw:po-loc");
      if (any_in(ctx.prop, w, s.in_rcp)) return blocked("cpw:propagation");
      s.in_rcp[w] = true;
      s.rcp.push_back(w);
      return {};
    case Label::Kind::SatisfyRead: {
      if (!ctx.po_loc.contains(w, r) && !s.buff[w]) return blocked("sr:local-or-committed");
      if (any_in(ctx.ppo_fences, r, s.sr)) return blocked("sr:ppo");
      for (EventId w2 : ctx.co.successors(w))
        if (ctx.prop_hb.contains(w2, r)) return blocked("sr:observation");
      if (ctx.prop_reads)
        for (EventId e : ctx.prop.successors(r))
          if ((p.events[e].is_write() && s.buff[e]) || (p.events[e].is_read() && s.sr[e]))
            return blocked("sr:propagation");
      s.sr[r] = true;
      return {};
    }
    case Label::Kind::CommitRead: {
      if (!s.sr[r]) return blocked("cr:satisfied");
      if (!visible(s, w, r, ctx, p)) return blocked("cr:visible");
      for (EventId e : ctx.ppo_fences.successors(r)) {
        if (p.events[e].is_write() && s.buff[e]) return blocked("cr:ppo-W");
        if (p.events[e].is_read() && s.sr[e]) return blocked("cr:ppo-R");
      }
      s.cr[r] = true;
      s.cr_pairs.emplace_back(w, r);
      return {};
    }
  }
  return blocked("unknown-label");
}

Derived derive_from_path(const Program& p, const Path& path) {
  std::size_t n = p.size();
  const auto& ev = p.events;
  std::vector<int> cw(n, 0), cpw(n, 0), sread(n, 0), cread(n, 0);
  std::vector<EventId> s_src(n, 0), c_src(n, 0);
  std::vector<EventId> cp_order;
  auto need = [&](EventId e, bool write) {
    if (e >= n) throw PathError("label names an unknown event");
    if (ev[e].is_init()) throw PathError("label names an init write");
    if (write ? !ev[e].is_write() : !ev[e].is_read())
      throw PathError("label " + std::string(write ? "expects a write: " : "expects a read: ") +
                      p.event_name(e));
  };
  for (const Label& l : path) {
    switch (l.kind) {
      case Label::Kind::CommitWrite: need(l.w, true); ++cw[l.w]; break;
      case Label::Kind::CoherencePoint:
        need(l.w, true);
        ++cpw[l.w];
        cp_order.push_back(l.w);
        break;
      case Label::Kind::SatisfyRead:
      case Label::Kind::CommitRead: {
        need(l.r, false);
        if (l.w >= n || !ev[l.w].is_write()) throw PathError("read label names a non-write source");
        if (ev[l.w].loc != ev[l.r].loc)
          throw PathError("read " + p.event_name(l.r) + " paired with a write to another location");
        bool sat = l.kind == Label::Kind::SatisfyRead;
        ++(sat ? sread : cread)[l.r];
        (sat ? s_src : c_src)[l.r] = l.w;
        break;
      }
    }
  }
  Derived d{Relation(n), Relation(n)};
  for (EventId e = 0; e < p.n_program; ++e) {
    if (ev[e].is_write() && (cw[e] != 1 || cpw[e] != 1))
      throw PathError("write " + p.event_name(e) + " needs exactly one c and one cp label");
    if (ev[e].is_read()) {
      if (sread[e] != 1 || cread[e] != 1)
        throw PathError("read " + p.event_name(e) + " needs exactly one s and one c label");
      if (s_src[e] != c_src[e])
        throw PathError("read " + p.event_name(e) + " satisfied and committed from different writes");
      d.rf.add(c_src[e], e);
    }
  }
  for (std::size_t loc = 0; loc < p.locations.size(); ++loc) {
    std::vector<EventId> chain{p.init_write[loc]};
    for (EventId w : cp_order)
      if (ev[w].loc == static_cast<int>(loc)) chain.push_back(w);
    for (std::size_t i = 0; i < chain.size(); ++i)
      for (std::size_t j = i + 1; j < chain.size(); ++j) d.co.add(chain[i], chain[j]);
  }
  return d;
}

AcceptResult run_path(const Program& p, const Path& path, const MachineContext& ctx) {
  AcceptResult res;
  MachineState s = initial_state(p);
  for (std::size_t i = 0; i < path.size(); ++i) {
    StepResult st = step(s, path[i], ctx, p);
    res.trace.push_back(label_string(p, path[i]) + (st.ok ? "  ok" : "  blocked " + st.premise));
    if (!st.ok) {
      res.accepted = false;
      res.blocked_at = i;
      res.premise = st.premise;
      return res;
    }
  }
  res.blocked_at = path.size();
  return res;
}

AcceptResult accepts(std::shared_ptr<const Program> p, const Path& path, const ModelAst& model,
                     const EvalOptions& opts, const MachineOptions& mopts) {
  Derived d = derive_from_path(*p, path);
  Candidate c = make_candidate(p, d.rf, d.co);
  if (std::string err = check_wellformed(c); !err.empty()) throw PathError(err);
  return run_path(*p, path, machine_context(c, model, opts, mopts));
}

namespace {

// Label slots of the program events: writes get c and cp, reads get s and c.
struct LabelTable {
  std::vector<Label> labels;
  std::vector<int> first;  // event -> index of its first label, -1 for init writes

  LabelTable(const Candidate& c) {
    const Program& p = *c.prog;
    first.assign(p.size(), -1);
    for (EventId e = 0; e < p.n_program; ++e) {
      const Event& ev = p.events[e];
      if (!ev.is_mem()) continue;
      first[e] = static_cast<int>(labels.size());
      if (ev.is_write()) {
        labels.push_back({Label::Kind::CommitWrite, e, 0});
        labels.push_back({Label::Kind::CoherencePoint, e, 0});
      } else {
        EventId w = c.rf_source(e);
        labels.push_back({Label::Kind::SatisfyRead, w, e});
        labels.push_back({Label::Kind::CommitRead, w, e});
      }
    }
  }
  int first_of(EventId e) const { return first[e]; }
  int second_of(EventId e) const { return first[e] + 1; }
};

}  // namespace

Path witness_path(const Candidate& c, const MachineContext& ctx) {
  const Program& p = *c.prog;
  const auto& ev = p.events;
  LabelTable t(c);
  std::size_t L = t.labels.size();
  Relation r(L);
  auto prog_ev = [&](EventId e) { return t.first[e] >= 0; };
  std::vector<EventId> writes;
  for (EventId e = 0; e < p.n_program; ++e) {
    if (!prog_ev(e)) continue;
    r.add(t.first_of(e), t.second_of(e));  // s(r) < c(r), c(w) < cp(w)
    if (ev[e].is_write()) writes.push_back(e);
  }
  // c(w) < s(r) for fenced WR pairs and for rfe
  for (auto [a, b] : (ctx.fences | c.rfe).pairs())
    if (prog_ev(a) && prog_ev(b) && ev[a].is_write() && ev[b].is_read()) r.add(t.first_of(a), t.first_of(b));
  // co and WW prop order the coherence points
  for (auto [a, b] : (ctx.co | closure(ctx.prop, false)).pairs())
    if (prog_ev(a) && prog_ev(b) && ev[a].is_write() && ev[b].is_write()) r.add(t.second_of(a), t.second_of(b));
  // prop edges touching reads order the first labels of their endpoints
  if (ctx.prop_reads)
    for (auto [a, b] : ctx.prop.pairs())
      if (prog_ev(a) && prog_ev(b) && a != b) r.add(t.first_of(a), t.first_of(b));
  // a read ordered before e by ppo or fences commits before e is satisfied or committed
  for (auto [a, b] : ctx.ppo_fences.pairs())
    if (prog_ev(a) && prog_ev(b) && ev[a].is_read())
      r.add(t.second_of(a), t.first_of(b));  // s(b) for reads, c(b) for writes
  // fifo: commit order and coherence-point order agree on writes
  Relation rc = closure(r, false);
  Relation worder(p.size());
  for (EventId a : writes)
    for (EventId b : writes) {
      if (a == b) continue;
      if (rc.contains(t.first_of(a), t.first_of(b)) || rc.contains(t.second_of(a), t.second_of(b)))
        worder.add(a, b);
    }
  auto lin = topo_sort(worder);
  if (!lin) throw WitnessError("commit and coherence-point orders cannot agree");
  std::vector<EventId> seq;
  for (EventId e : *lin)
    if (prog_ev(e) && ev[e].is_write()) seq.push_back(e);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    r.add(t.first_of(seq[i]), t.first_of(seq[i + 1]));
    r.add(t.second_of(seq[i]), t.second_of(seq[i + 1]));
  }
  auto order = topo_sort(r);
  if (!order) {
    auto cyc = check_acyclic(r).cycle;
    std::string msg = "cycle in the witness relation:";
    for (EventId i : cyc) msg += " " + label_string(p, t.labels[i]);
    throw WitnessError(msg);
  }
  Path path;
  for (EventId i : *order) path.push_back(t.labels[i]);
  return path;
}

std::set<Behaviour> enumerate_accepted(std::shared_ptr<const Program> p, const ModelAst& model,
                                       std::size_t bound, const EvalOptions& opts,
                                       const MachineOptions& mopts, MachineStats* stats) {
  std::size_t mem = 0;
  for (EventId e = 0; e < p->n_program; ++e)
    if (p->events[e].is_mem()) ++mem;
  if (mem > bound)
    throw BoundExceeded((p->test ? p->test->name + ": " : std::string()) + std::to_string(mem) +
                        " memory events exceed the bound of " + std::to_string(bound));
  std::set<Behaviour> out;
  CandidateStream stream(p);
  while (auto c = stream.next()) {
    if (stats) ++stats->candidates;
    Behaviour b{c->rf.pairs(), state_string(final_state(*c))};
    if (out.count(b)) continue;
    MachineContext ctx = machine_context(*c, model, opts, mopts);
    LabelTable t(*c);
    std::size_t L = t.labels.size();
    // predecessor mask of each label: its chain partner and, for cp, the co-previous write
    std::vector<std::uint32_t> pred(L, 0);
    for (EventId e = 0; e < p->n_program; ++e) {
      if (t.first[e] < 0) continue;
      pred[t.second_of(e)] |= 1u << t.first_of(e);
      if (p->events[e].is_write())
        for (EventId w2 = 0; w2 < p->n_program; ++w2)
          if (t.first[w2] >= 0 && c->co.contains(w2, e)) pred[t.second_of(e)] |= 1u << t.second_of(w2);
    }
    std::uint32_t full = L == 32 ? ~0u : (1u << L) - 1;
    std::vector<char> dead(std::size_t{1} << L, 0);
    std::size_t explored = 0;
    auto dfs = [&](auto&& self, std::uint32_t mask, const MachineState& s) -> bool {
      if (mask == full) return true;
      if (dead[mask]) return false;
      ++explored;
      for (std::size_t i = 0; i < L; ++i) {
        std::uint32_t bit = 1u << i;
        if ((mask & bit) || (pred[i] & ~mask)) continue;
        MachineState s2 = s;
        if (!step(s2, t.labels[i], ctx, *p).ok) continue;
        if (self(self, mask | bit, s2)) return true;
      }
      dead[mask] = 1;
      return false;
    };
    if (dfs(dfs, 0, initial_state(*p))) out.insert(std::move(b));
    if (stats) stats->explored_states += explored;
  }
  return out;
}

std::set<Behaviour> axiomatic_behaviours(std::shared_ptr<const Program> p, const ModelAst& model,
                                         const EvalOptions& opts) {
  std::set<Behaviour> out;
  CandidateStream stream(p);
  while (auto c = stream.next())
    if (eval_model(model, *c, opts).allowed) out.insert({c->rf.pairs(), state_string(final_state(*c))});
  return out;
}

}  // namespace memcat
