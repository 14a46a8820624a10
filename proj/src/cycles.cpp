#include "memcat/cycles.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "memcat/litmus.hpp"

namespace memcat {

namespace {

std::string po_annotation(const Program& p, EventId a, EventId b) {
  auto fenced = [&](FenceKind k) {
    auto it = p.fences.find(k);
    return it != p.fences.end() && it->second.contains(a, b);
  };
  for (FenceKind k : kAllFences)
    if (k != FenceKind::Isync && k != FenceKind::Isb && fenced(k)) return fence_name(k);
  if (p.ctrl_cfence.contains(a, b)) {
    bool isb = p.arch == Arch::ARM || fenced(FenceKind::Isb);
    return isb ? "ctrlisb" : "ctrlisync";
  }
  if (p.addr.contains(a, b)) return "addr";
  if (p.data.contains(a, b)) return "data";
  if (p.ctrl.contains(a, b)) return "ctrl";
  for (FenceKind k : {FenceKind::Isync, FenceKind::Isb})
    if (fenced(k)) return fence_name(k);
  return "";
}

}  // namespace

StaticProgram static_program(const Program& p) {
  StaticProgram sp;
  sp.name = p.test ? p.test->name : "";
  sp.arch = p.arch;
  sp.locations = p.locations;
  std::vector<EventId> ev_of;
  for (EventId e = 0; e < p.n_program; ++e) {
    const Event& ev = p.events[e];
    if (!ev.is_mem()) continue;
    StaticAccess a;
    a.thread = ev.thread;
    a.dir = ev.is_write() ? Dir::W : Dir::R;
    a.loc = ev.loc;
    if (!sp.accesses.empty() && sp.accesses.back().thread == ev.thread) {
      const StaticAccess& prev = sp.accesses.back();
      a.po_index = prev.po_index + 1;
      EventId pe = ev_of.back();
      for (FenceKind k : kAllFences)
        if (auto it = p.fences.find(k); it != p.fences.end() && it->second.contains(pe, e))
          a.fences_before.push_back(k);
    }
    sp.accesses.push_back(a);
    ev_of.push_back(e);
  }
  for (std::size_t i = 0; i < sp.accesses.size(); ++i)
    for (std::size_t j = i + 1; j < sp.accesses.size(); ++j) {
      if (sp.accesses[i].thread != sp.accesses[j].thread) continue;
      sp.po_annot[{static_cast<int>(i), static_cast<int>(j)}] = po_annotation(p, ev_of[i], ev_of[j]);
    }
  for (std::size_t i = 0; i + 1 < sp.accesses.size(); ++i) {
    if (sp.accesses[i].thread != sp.accesses[i + 1].thread) continue;
    const std::string& an = sp.po_annot[{static_cast<int>(i), static_cast<int>(i + 1)}];
    bool dep = an == "addr" || an == "data" || an == "ctrl" || an.rfind("ctrl", 0) == 0;
    if (dep) sp.accesses[i].dep_to_next = an;
  }
  return sp;
}

namespace {

char dir_char(Dir d) { return d == Dir::W ? 'W' : 'R'; }

CycleEdge com_edge(const StaticProgram& sp, int a, int b) {
  const StaticAccess& x = sp.accesses[a];
  const StaticAccess& y = sp.accesses[b];
  CycleEdge e;
  e.external = x.thread != y.thread;
  if (x.dir == Dir::W && y.dir == Dir::R) e.kind = CycleEdge::Kind::Rf;
  else if (x.dir == Dir::R && y.dir == Dir::W) e.kind = CycleEdge::Kind::Fr;
  else e.kind = CycleEdge::Kind::Co;
  return e;
}

CycleEdge po_edge(const StaticProgram& sp, int a, int b) {
  CycleEdge e;
  e.kind = CycleEdge::Kind::Po;
  e.external = false;
  if (auto it = sp.po_annot.find({a, b}); it != sp.po_annot.end()) e.annot = it->second;
  return e;
}

LabeledCycle label_cycle(const StaticProgram& sp, const std::vector<int>& nodes) {
  LabeledCycle c;
  c.accesses = nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int a = nodes[i], b = nodes[(i + 1) % nodes.size()];
    c.edges.push_back(sp.accesses[a].thread == sp.accesses[b].thread ? po_edge(sp, a, b)
                                                                      : com_edge(sp, a, b));
  }
  return c;
}

bool is_com(const CycleEdge& e) { return e.kind != CycleEdge::Kind::Po; }

}  // namespace

std::string edge_string(const StaticProgram& sp, const LabeledCycle& c, std::size_t i) {
  const CycleEdge& e = c.edges[i];
  switch (e.kind) {
    case CycleEdge::Kind::Po: {
      if (!e.annot.empty()) return e.annot;
      int a = c.accesses[i], b = c.accesses[(i + 1) % c.accesses.size()];
      return sp.accesses[a].loc == sp.accesses[b].loc ? "po-loc" : "po";
    }
    case CycleEdge::Kind::Rf: return e.external ? "rfe" : "rfi";
    case CycleEdge::Kind::Fr: return e.external ? "fre" : "fri";
    case CycleEdge::Kind::Co: return e.external ? "coe" : "coi";
  }
  return "?";
}

std::string cycle_string(const StaticProgram& sp, const LabeledCycle& c) {
  std::string out;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    if (i) out += ';';
    out += edge_string(sp, c, i);
  }
  return out;
}

bool condition_i(const StaticProgram& sp, const LabeledCycle& c) {
  std::map<int, std::vector<std::size_t>> by_thread;
  for (std::size_t i = 0; i < c.accesses.size(); ++i) by_thread[sp.accesses[c.accesses[i]].thread].push_back(i);
  std::size_t n = c.accesses.size();
  for (const auto& [t, pos] : by_thread) {
    if (pos.size() > 2) return false;
    if (pos.size() == 2) {
      if (sp.accesses[c.accesses[pos[0]]].loc == sp.accesses[c.accesses[pos[1]]].loc) return false;
      // the thread is traversed once: its two accesses are adjacent in the cycle
      bool adjacent = (pos[0] + 1) % n == pos[1] || (pos[1] + 1) % n == pos[0];
      if (!adjacent) return false;
    }
  }
  return true;
}

bool condition_ii(const StaticProgram& sp, const LabeledCycle& c) {
  std::map<int, std::vector<int>> by_loc;
  for (int a : c.accesses) by_loc[sp.accesses[a].loc].push_back(sp.accesses[a].thread);
  for (auto& [l, threads] : by_loc) {
    if (threads.size() > 3) return false;
    std::set<int> distinct(threads.begin(), threads.end());
    if (distinct.size() != threads.size()) return false;
  }
  return true;
}

std::vector<LabeledCycle> raw_critical_cycles(const StaticProgram& sp) {
  const auto& acc = sp.accesses;
  int n = static_cast<int>(acc.size());
  std::vector<std::vector<int>> succ(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      bool same_thread = acc[a].thread == acc[b].thread;
      if (same_thread && acc[a].po_index < acc[b].po_index) succ[a].push_back(b);
      if (!same_thread && acc[a].loc == acc[b].loc && (acc[a].dir == Dir::W || acc[b].dir == Dir::W))
        succ[a].push_back(b);
    }
  std::vector<LabeledCycle> out;
  std::vector<int> path;
  std::vector<bool> on_path(n, false);
  std::map<int, int> per_thread, per_loc;
  // elementary circuits, each found once from its least vertex; the filters prune the search
  auto dfs = [&](auto&& self, int s, int u) -> void {
    for (int v : succ[u]) {
      if (v == s) {
        if (path.size() < 2) continue;
        LabeledCycle c = label_cycle(sp, path);
        std::set<int> locs;
        for (int a : path) locs.insert(acc[a].loc);
        if (locs.size() >= 2 && condition_i(sp, c) && condition_ii(sp, c)) out.push_back(std::move(c));
        continue;
      }
      if (v < s || on_path[v]) continue;
      if (per_thread[acc[v].thread] >= 2 || per_loc[acc[v].loc] >= 3) continue;
      path.push_back(v);
      on_path[v] = true;
      ++per_thread[acc[v].thread];
      ++per_loc[acc[v].loc];
      self(self, s, v);
      --per_thread[acc[v].thread];
      --per_loc[acc[v].loc];
      on_path[v] = false;
      path.pop_back();
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on_path[s] = true;
    per_thread.clear();
    per_loc.clear();
    per_thread[acc[s].thread] = 1;
    per_loc[acc[s].loc] = 1;
    dfs(dfs, s, s);
    on_path[s] = false;
  }
  return out;
}

LabeledCycle reduce_cycle(const StaticProgram& sp, LabeledCycle c, std::mt19937* rng) {
  using K = CycleEdge::Kind;
  auto rewrite = [](const CycleEdge& a, const CycleEdge& b) -> std::optional<K> {
    if (a.kind == K::Co && b.kind == K::Co) return K::Co;
    if (a.kind == K::Rf && b.kind == K::Fr) return K::Co;
    if (a.kind == K::Fr && b.kind == K::Co) return K::Fr;
    return std::nullopt;
  };
  while (c.edges.size() > 2) {
    std::size_t n = c.edges.size();
    std::vector<std::size_t> sites;
    for (std::size_t i = 0; i < n; ++i)
      if (rewrite(c.edges[i], c.edges[(i + 1) % n])) sites.push_back(i);
    if (sites.empty()) break;
    std::size_t i = sites[0];
    if (rng) i = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(*rng)];
    std::size_t j = (i + 1) % n;
    CycleEdge e;
    e.kind = *rewrite(c.edges[i], c.edges[j]);
    int from = c.accesses[i], to = c.accesses[(j + 1) % n];
    e.external = sp.accesses[from].thread != sp.accesses[to].thread;
    c.edges[i] = e;
    c.edges.erase(c.edges.begin() + static_cast<std::ptrdiff_t>(j));
    c.accesses.erase(c.accesses.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return c;
}

namespace {

LabeledCycle canonical_rotation(LabeledCycle c) {
  auto it = std::min_element(c.accesses.begin(), c.accesses.end());
  auto k = it - c.accesses.begin();
  std::rotate(c.accesses.begin(), c.accesses.begin() + k, c.accesses.end());
  std::rotate(c.edges.begin(), c.edges.begin() + k, c.edges.end());
  return c;
}

}  // namespace

std::vector<LabeledCycle> sc_per_location_cycles(const StaticProgram& sp) {
  using K = CycleEdge::Kind;
  const auto& acc = sp.accesses;
  int n = static_cast<int>(acc.size());
  std::vector<LabeledCycle> out;
  auto edge = [](K k, bool ext) { return CycleEdge{k, ext, ""}; };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (acc[i].thread != acc[j].thread || acc[i].loc != acc[j].loc) continue;
      CycleEdge po = po_edge(sp, i, j);
      Dir a = acc[i].dir, b = acc[j].dir;
      if (a == Dir::W && b == Dir::W) out.push_back({{i, j}, {po, edge(K::Co, false)}, "coWW"});
      if (a == Dir::R && b == Dir::W) out.push_back({{i, j}, {po, edge(K::Rf, false)}, "coRW1"});
      for (int k = 0; k < n; ++k) {
        if (acc[k].thread == acc[i].thread || acc[k].loc != acc[i].loc || acc[k].dir != Dir::W) continue;
        if (a == Dir::R && b == Dir::W)
          out.push_back({{i, j, k}, {po, edge(K::Co, true), edge(K::Rf, true)}, "coRW2"});
        if (a == Dir::W && b == Dir::R)
          out.push_back({{i, j, k}, {po, edge(K::Fr, true), edge(K::Co, true)}, "coWR"});
        if (a == Dir::R && b == Dir::R)
          out.push_back({{i, j, k}, {po, edge(K::Fr, true), edge(K::Rf, true)}, "coRR"});
      }
    }
  return out;
}

std::vector<LabeledCycle> find_critical_cycles(const StaticProgram& sp) {
  std::vector<LabeledCycle> out;
  for (const auto& raw : raw_critical_cycles(sp)) {
    LabeledCycle c = canonical_rotation(reduce_cycle(sp, raw));
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  for (auto& c : sc_per_location_cycles(sp)) out.push_back(std::move(c));
  return out;
}

namespace {

struct Arc {
  std::string digram;
  std::string annot;  // "" for single-access arcs
};

// '+' < 'w' < 'r'
int name_rank(char ch) {
  switch (ch) {
    case '+': return 0;
    case 'w': return 1;
    case 'r': return 2;
    default: return 3 + ch;
  }
}

bool name_less(const std::string& a, const std::string& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](char x, char y) { return name_rank(x) < name_rank(y); });
}

const std::map<std::string, std::string>& classic_names() {
  static const std::map<std::string, std::string> m = {
      {"rw+rw", "lb"},       {"ww+rr", "mp"},     {"w+rw+rr", "wrc"},      {"ww+rw+rr", "isa2"},
      {"ww+ww", "2+2w"},     {"w+rw+ww", "w+rw+2w"}, {"wr+wr", "sb"},     {"w+rr+wr", "rwc"},
      {"ww+wr", "r"},        {"ww+rw", "s"},      {"ww+rr+wr", "w+rwc"}, {"w+rr+w+rr", "iriw"},
  };
  return m;
}

std::string suffix(const std::vector<std::string>& annots) {
  if (std::all_of(annots.begin(), annots.end(), [](const std::string& a) { return a == "po"; })) return "";
  std::string out;
  for (std::size_t i = 0; i < annots.size();) {
    std::size_t j = i;
    while (j < annots.size() && annots[j] == annots[i]) ++j;
    out += "+" + annots[i] + (j - i >= 2 ? "s" : "");
    i = j;
  }
  return out;
}

}  // namespace

PatternName name_pattern(const StaticProgram& sp, const LabeledCycle& c) {
  PatternName pn;
  if (c.shape) {
    pn.systematic = *c.shape;
    pn.classic = *c.shape;
    pn.full = *c.shape;
    return pn;
  }
  std::size_t n = c.accesses.size();
  auto thread_of = [&](std::size_t i) { return sp.accesses[c.accesses[i % n]].thread; };
  std::size_t start = 0;
  while (start < n && thread_of(start + n - 1) == thread_of(start)) ++start;
  if (start == n) start = 0;
  std::vector<Arc> arcs;
  for (std::size_t k = 0; k < n;) {
    std::size_t i = (start + k) % n;
    Arc arc;
    arc.digram += static_cast<char>(std::tolower(dir_char(sp.accesses[c.accesses[i]].dir)));
    std::size_t len = 1;
    if (k + 1 < n && thread_of(i + 1) == thread_of(i)) {
      arc.digram += static_cast<char>(std::tolower(dir_char(sp.accesses[c.accesses[(i + 1) % n]].dir)));
      arc.annot = c.edges[i].annot.empty() ? "po" : c.edges[i].annot;
      len = 2;
    }
    arcs.push_back(arc);
    k += len;
  }
  std::string best_name, best_annots;
  std::vector<std::string> best_list;
  bool have = false;
  for (std::size_t r = 0; r < arcs.size(); ++r) {
    std::string name, annots;
    std::vector<std::string> list;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      const Arc& a = arcs[(r + k) % arcs.size()];
      if (k) name += '+';
      name += a.digram;
      if (!a.annot.empty()) {
        list.push_back(a.annot);
        annots += a.annot + ",";
      }
    }
    if (!have || name_less(name, best_name) || (name == best_name && annots < best_annots)) {
      best_name = name;
      best_annots = annots;
      best_list = list;
      have = true;
    }
  }
  pn.systematic = best_name;
  if (auto it = classic_names().find(best_name); it != classic_names().end()) pn.classic = it->second;
  pn.full = pn.classic.value_or(pn.systematic) + suffix(best_list);
  return pn;
}

std::string axiom_name(Axiom a) {
  switch (a) {
    case Axiom::ScPerLocation: return "sc-per-location";
    case Axiom::NoThinAir: return "no-thin-air";
    case Axiom::Observation: return "observation";
    case Axiom::Propagation: return "propagation";
  }
  return "?";
}

Axiom classify(const StaticProgram& sp, const LabeledCycle& c) {
  using K = CycleEdge::Kind;
  std::size_t n = c.edges.size();
  auto same_loc = [&](std::size_t i) {
    return sp.accesses[c.accesses[i]].loc == sp.accesses[c.accesses[(i + 1) % n]].loc;
  };
  // SC instance: hb = po | fences | rfe, prop = po | fences | rf | fr
  auto in_hb = [&](std::size_t i) {
    const CycleEdge& e = c.edges[i % n];
    return e.kind == K::Po || (e.kind == K::Rf && e.external);
  };
  auto in_prop = [&](std::size_t i) {
    const CycleEdge& e = c.edges[i % n];
    return e.kind == K::Po || e.kind == K::Rf || e.kind == K::Fr;
  };
  bool scpl = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!(is_com(c.edges[i]) || same_loc(i))) scpl = false;
  if (scpl) return Axiom::ScPerLocation;
  bool hb = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!in_hb(i)) hb = false;
  if (hb) return Axiom::NoThinAir;
  for (std::size_t i = 0; i < n; ++i) {
    const CycleEdge& e = c.edges[i];
    if (e.kind != K::Fr || !e.external || !in_prop(i + 1)) continue;
    bool rest = true;
    for (std::size_t k = 2; k < n; ++k)
      if (!in_hb(i + k)) rest = false;
    if (rest) return Axiom::Observation;
  }
  return Axiom::Propagation;
}

std::vector<CycleRecord> mine(const Program& p) {
  StaticProgram sp = static_program(p);
  std::vector<CycleRecord> out;
  for (const auto& c : find_critical_cycles(sp)) {
    CycleRecord rec;
    rec.test = sp.name;
    rec.name = name_pattern(sp, c);
    rec.axiom = classify(sp, c);
    rec.sequence = cycle_string(sp, c);
    for (int a : c.accesses) rec.accesses.push_back(sp.accesses[a]);
    rec.locations = sp.locations;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace memcat
