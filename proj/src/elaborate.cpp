#include <algorithm>

#include "memcat/litmus.hpp"

namespace memcat {

namespace {

const char* kFlag = "cr0";

Value int_value(long v) { return {Value::Kind::Int, v, -1}; }
Value addr_value(int loc) { return {Value::Kind::Addr, 0, loc}; }

Value xor_values(const Value& a, const Value& b, bool same_reg) {
  if (same_reg) return int_value(0);
  if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) return int_value(a.v ^ b.v);
  return {};
}

Value add_values(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind == K::Int && b.kind == K::Int) return int_value(a.v + b.v);
  if (a.kind == K::Addr && b.kind == K::Int && b.v == 0) return a;
  if (a.kind == K::Int && a.v == 0 && b.kind == K::Addr) return b;
  return {};
}

Value sum_address(const std::vector<Value>& parts) {
  Value acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = add_values(acc, parts[i]);
  return acc;
}

int loc_index(const std::vector<std::string>& locs, const std::string& l) {
  auto it = std::find(locs.begin(), locs.end(), l);
  return it == locs.end() ? -1 : static_cast<int>(it - locs.begin());
}

const RegInit* find_init(const LitmusTest& t, int thread, const std::string& reg) {
  const RegInit* global = nullptr;
  for (const auto& ri : t.reg_init) {
    if (ri.reg != reg) continue;
    if (ri.thread == thread) return &ri;
    if (ri.thread < 0) global = &ri;
  }
  return global;
}

Value init_value(const LitmusTest&, const std::vector<std::string>& locs, const RegInit& ri) {
  return ri.is_addr ? addr_value(loc_index(locs, ri.loc)) : int_value(ri.value);
}

// operand name used for a location or immediate written in place of a register
std::string pseudo_addr(const std::string& loc) { return "&" + loc; }
std::string pseudo_imm(long v) { return "#" + std::to_string(v); }

}  // namespace

EventStructure elaborate(const LitmusTest& test) {
  EventStructure es;
  es.locations = test.locations();
  es.nthreads = static_cast<int>(test.threads.size());
  std::vector<std::pair<EventId, EventId>> po, iico, rf_reg;

  auto fail = [&](int t, const Instruction& in, const std::string& msg) {
    throw ParseError("T" + std::to_string(t) + ": " + msg + " in '" + print_instruction(in) + "'",
                     in.line, 1);
  };

  for (int t = 0; t < es.nthreads; ++t) {
    struct Slot {
      EventId writer;
      Value value;
    };
    std::map<std::string, Slot> cur;
    int po_index = 0;
    std::vector<EventId> thread_events;

    auto make = [&](Action a) -> Event& {
      Event e;
      e.id = static_cast<EventId>(es.events.size());
      e.thread = t;
      e.po_index = po_index++;
      e.action = a;
      es.events.push_back(e);
      thread_events.push_back(e.id);
      return es.events.back();
    };
    auto init_writer = [&](const std::string& reg, Value v) {
      Event e;
      e.id = static_cast<EventId>(es.events.size());
      e.thread = kInitThread;
      e.po_index = -1;
      e.action = Action::RegWrite;
      e.reg = "T" + std::to_string(t) + ":" + reg;
      es.events.push_back(e);
      cur[reg] = {e.id, v};
    };

    for (std::size_t i = 0; i < test.threads[t].size(); ++i) {
      const Instruction& in = test.threads[t][i];
      int origin = static_cast<int>(i);

      auto read = [&](const std::string& name, Port port) -> std::pair<EventId, Value> {
        if (!cur.count(name)) {
          if (name[0] == '&') {
            int l = loc_index(es.locations, name.substr(1));
            init_writer(name, addr_value(l));
          } else if (name[0] == '#') {
            init_writer(name, int_value(std::stol(name.substr(1))));
          } else if (const RegInit* ri = find_init(test, t, name)) {
            init_writer(name, init_value(test, es.locations, *ri));
          } else {
            fail(t, in, "use of undefined register " + name);
          }
        }
        Event& e = make(Action::RegRead);
        e.reg = name;
        e.port = port;
        e.origin = origin;
        rf_reg.emplace_back(cur[name].writer, e.id);
        return {e.id, cur[name].value};
      };
      auto write = [&](const std::string& name, Value v) {
        Event& e = make(Action::RegWrite);
        e.reg = name;
        e.origin = origin;
        cur[name] = {e.id, v};
        return e.id;
      };
      auto address = [&](std::vector<EventId>& srcs) {
        std::vector<Value> parts;
        for (std::size_t k = 0; k < in.addr.size(); ++k) {
          const std::string& a = in.addr[k];
          std::string name = is_register(a) ? a : pseudo_addr(a);
          auto [id, v] = read(name, Port::Address);
          srcs.push_back(id);
          parts.push_back(v);
        }
        Value v = sum_address(parts);
        if (v.kind != Value::Kind::Addr || v.loc < 0) fail(t, in, "address is not statically a location");
        return v.loc;
      };

      switch (in.kind) {
        case Instruction::Kind::MovConst: write(in.dst, int_value(in.imm)); break;
        case Instruction::Kind::Load: {
          std::vector<EventId> srcs;
          int loc = address(srcs);
          Event& m = make(Action::MemRead);
          m.loc = loc;
          m.origin = origin;
          EventId mid = m.id;
          for (EventId s : srcs) iico.emplace_back(s, mid);
          EventId w = write(in.dst, Value{});
          iico.emplace_back(mid, w);
          break;
        }
        case Instruction::Kind::Store: {
          std::vector<EventId> srcs;
          int loc = address(srcs);
          auto [vid, v] = read(in.src.empty() ? pseudo_imm(in.imm) : in.src, Port::Value);
          if (v.kind != Value::Kind::Int) fail(t, in, "stored value is not statically known");
          srcs.push_back(vid);
          Event& m = make(Action::MemWrite);
          m.loc = loc;
          m.value = static_cast<int>(v.v);
          m.origin = origin;
          for (EventId s : srcs) iico.emplace_back(s, m.id);
          break;
        }
        case Instruction::Kind::Xor:
        case Instruction::Kind::Add: {
          auto [a, va] = read(in.src1, Port::None);
          auto [b, vb] = read(in.src2, Port::None);
          Value v = in.kind == Instruction::Kind::Xor ? xor_values(va, vb, in.src1 == in.src2)
                                                      : add_values(va, vb);
          EventId w = write(in.dst, v);
          iico.emplace_back(a, w);
          iico.emplace_back(b, w);
          break;
        }
        case Instruction::Kind::Cmp: {
          auto [a, va] = read(in.src1, Port::None);
          EventId w = write(kFlag, Value{});
          iico.emplace_back(a, w);
          break;
        }
        case Instruction::Kind::Branch: {
          auto [a, va] = read(kFlag, Port::Test);
          Event& b = make(Action::Branch);
          b.origin = origin;
          iico.emplace_back(a, b.id);
          break;
        }
        case Instruction::Kind::Fence: {
          Event& f = make(Action::Fence);
          f.fence = in.fence;
          f.origin = origin;
          break;
        }
        case Instruction::Kind::LabelDef: break;
      }
    }
    for (std::size_t a = 0; a < thread_events.size(); ++a)
      for (std::size_t b = a + 1; b < thread_events.size(); ++b)
        po.emplace_back(thread_events[a], thread_events[b]);
  }
  std::size_t n = es.events.size();
  es.po = Relation::from_pairs(n, po);
  es.iico = Relation::from_pairs(n, iico);
  es.rf_reg = Relation::from_pairs(n, rf_reg);
  return es;
}

Dependencies compute_dependencies(const EventStructure& es) {
  std::size_t n = es.events.size();
  const auto& ev = es.events;
  Dependencies d{closure(es.rf_reg | es.iico, false), Relation(n), Relation(n), Relation(n),
                 Relation(n)};
  for (const Event& rr : ev) {
    if (rr.action != Action::RegRead || (rr.port != Port::Address && rr.port != Port::Value)) continue;
    for (EventId m : es.iico.successors(rr.id)) {
      if (!ev[m].is_mem()) continue;
      if (rr.port == Port::Value && !ev[m].is_write()) continue;
      for (const Event& r : ev)
        if (r.is_read() && d.dd_reg.contains(r.id, rr.id))
          (rr.port == Port::Address ? d.addr : d.data).add(r.id, m);
    }
  }
  for (const Event& b : ev) {
    if (b.action != Action::Branch) continue;
    for (const Event& r : ev) {
      if (!r.is_read() || !d.dd_reg.contains(r.id, b.id)) continue;
      for (const Event& e : ev) {
        if (!e.is_mem() || !es.po.contains(b.id, e.id)) continue;
        d.ctrl.add(r.id, e.id);
        for (const Event& f : ev)
          if (f.action == Action::Fence && (f.fence == FenceKind::Isync || f.fence == FenceKind::Isb) &&
              es.po.contains(b.id, f.id) && es.po.contains(f.id, e.id)) {
            d.ctrl_cfence.add(r.id, e.id);
            break;
          }
      }
    }
  }
  return d;
}

Program project(const EventStructure& es, const Dependencies& deps) {
  Program p;
  p.locations = es.locations;
  p.nthreads = es.nthreads;
  std::vector<int> remap(es.events.size(), -1);
  std::vector<int> per_thread(es.nthreads, 0);
  for (const Event& e : es.events) {
    if (!e.is_mem()) continue;
    Event m = e;
    m.id = static_cast<EventId>(p.events.size());
    m.po_index = per_thread[e.thread]++;
    remap[e.id] = static_cast<int>(m.id);
    p.events.push_back(m);
  }
  p.n_program = p.events.size();
  for (std::size_t l = 0; l < p.locations.size(); ++l) {
    Event w;
    w.id = static_cast<EventId>(p.events.size());
    w.thread = kInitThread;
    w.po_index = -1;
    w.action = Action::MemWrite;
    w.loc = static_cast<int>(l);
    p.init_write.push_back(w.id);
    p.events.push_back(w);
  }
  std::size_t n = p.events.size();
  auto map_rel = [&](const Relation& r) {
    Relation out(n);
    for (auto [a, b] : r.pairs())
      if (remap[a] >= 0 && remap[b] >= 0) out.add(remap[a], remap[b]);
    return out;
  };
  p.po = map_rel(es.po);
  p.po_loc = Relation(n);
  for (auto [a, b] : p.po.pairs())
    if (p.events[a].loc == p.events[b].loc) p.po_loc.add(a, b);
  p.addr = map_rel(deps.addr);
  p.data = map_rel(deps.data);
  p.ctrl = map_rel(deps.ctrl);
  p.ctrl_cfence = map_rel(deps.ctrl_cfence);
  for (FenceKind k : kAllFences) p.fences[k] = Relation(n);
  for (const Event& f : es.events) {
    if (f.action != Action::Fence) continue;
    Relation& r = p.fences[f.fence];
    for (const Event& a : es.events)
      if (remap[a.id] >= 0 && es.po.contains(a.id, f.id))
        for (const Event& b : es.events)
          if (remap[b.id] >= 0 && es.po.contains(f.id, b.id)) r.add(remap[a.id], remap[b.id]);
  }
  p.mem_of_instr.resize(es.nthreads);
  for (const Event& e : es.events)
    if (e.is_mem()) {
      auto& v = p.mem_of_instr[e.thread];
      if (static_cast<int>(v.size()) <= e.origin) v.resize(e.origin + 1, -1);
      v[e.origin] = remap[e.id];
    }
  return p;
}

std::shared_ptr<const Program> build_program(const LitmusTest& test) {
  auto t = std::make_shared<const LitmusTest>(test);
  EventStructure es = elaborate(*t);
  Program p = project(es, compute_dependencies(es));
  p.test = t;
  p.arch = t->arch;
  for (const auto& [l, v] : t->mem_init)
    p.events[p.init_write[loc_index(p.locations, l)]].value = static_cast<int>(v);
  for (std::size_t th = 0; th < t->threads.size(); ++th)
    p.mem_of_instr[th].resize(t->threads[th].size(), -1);
  return std::make_shared<const Program>(std::move(p));
}

std::vector<std::map<std::string, Value>> final_registers(const Program& prog,
                                                          const std::vector<int>& values) {
  const LitmusTest& test = *prog.test;
  std::vector<std::map<std::string, Value>> out(test.threads.size());
  for (std::size_t t = 0; t < test.threads.size(); ++t) {
    auto& regs = out[t];
    auto get = [&](const std::string& r) {
      auto it = regs.find(r);
      if (it != regs.end()) return it->second;
      if (const RegInit* ri = find_init(test, static_cast<int>(t), r))
        return init_value(test, prog.locations, *ri);
      return Value{};
    };
    for (std::size_t i = 0; i < test.threads[t].size(); ++i) {
      const Instruction& in = test.threads[t][i];
      switch (in.kind) {
        case Instruction::Kind::MovConst: regs[in.dst] = int_value(in.imm); break;
        case Instruction::Kind::Load:
          regs[in.dst] = int_value(values[prog.mem_of_instr[t][i]]);
          break;
        case Instruction::Kind::Xor:
          regs[in.dst] = xor_values(get(in.src1), get(in.src2), in.src1 == in.src2);
          break;
        case Instruction::Kind::Add: regs[in.dst] = add_values(get(in.src1), get(in.src2)); break;
        default: break;
      }
    }
    for (const auto& ri : test.reg_init)
      if ((ri.thread < 0 || ri.thread == static_cast<int>(t)) && !regs.count(ri.reg))
        regs[ri.reg] = init_value(test, prog.locations, ri);
  }
  return out;
}

}  // namespace memcat
