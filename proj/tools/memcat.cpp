#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "memcat/corpus.hpp"
#include "memcat/cycles.hpp"
#include "memcat/enumerate.hpp"
#include "memcat/machine.hpp"
#include "memcat/models.hpp"

using json = nlohmann::ordered_json;
using namespace memcat;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct Input {
  std::string path;
  std::string error;
  LitmusTest test;
  std::shared_ptr<const Program> prog;
};

std::vector<std::string> expand(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<std::string> files;
      for (const auto& f : fs::recursive_directory_iterator(a))
        if (f.path().extension() == ".litmus") files.push_back(f.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (!fs::exists(a) && fs::exists(fs::path(litmus_dir()) / (a + ".litmus"))) {
      out.push_back((fs::path(litmus_dir()) / (a + ".litmus")).string());
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::vector<Input> load_inputs(const std::vector<std::string>& args) {
  std::vector<Input> out;
  for (const auto& path : expand(args)) {
    Input in;
    in.path = path;
    try {
      in.test = load_litmus_file(path);
      in.prog = build_program(in.test);
    } catch (const ParseError& e) {
      in.error = path + ":" + e.what();
    } catch (const std::exception& e) {
      in.error = path + ": " + e.what();
    }
    out.push_back(std::move(in));
  }
  std::stable_sort(out.begin(), out.end(), [](const Input& a, const Input& b) {
    return (a.error.empty() ? a.test.name : a.path) < (b.error.empty() ? b.test.name : b.path);
  });
  return out;
}

// Runs f on every input on a small worker pool; results keep the input order.
template <typename F>
auto parallel_map(const std::vector<Input>& inputs, F f) {
  using R = decltype(f(inputs.front()));
  std::vector<R> results(inputs.size());
  std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, inputs.size()); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < inputs.size();) results[i] = f(inputs[i]);
    });
  for (auto& t : pool) t.join();
  return results;
}

std::optional<std::string> expectation(const LitmusTest& t, const std::string& model) {
  for (const auto& [m, v] : t.expect)
    if (m == model) return v;
  return std::nullopt;
}

std::string quantifier_name(FinalCondition::Quantifier q) {
  switch (q) {
    case FinalCondition::Quantifier::Exists: return "exists";
    case FinalCondition::Quantifier::NotExists: return "~exists";
    case FinalCondition::Quantifier::Forall: return "forall";
    case FinalCondition::Quantifier::Observed: return "observed";
  }
  return "?";
}

json run_record(const Input& in, const BuiltinModel& model, const EvalOptions& opts, bool prune) {
  VerdictReport rep = verdict(in.prog, model.ast, opts, prune);
  json r;
  r["test"] = in.test.name;
  r["model"] = model.name;
  r["verdict"] = rep.condition_reachable ? "allowed" : "forbidden";
  r["quantifier"] = quantifier_name(in.test.final.quantifier);
  r["condition_holds"] = rep.condition_holds;
  r["candidates"] = rep.candidates;
  r["allowed"] = rep.allowed;
  r["states"] = rep.allowed_states;
  json fails = json::object();
  for (const auto& [k, v] : rep.check_failures) fails[k] = v;
  r["check_failures"] = fails;
  // checks that rule out the candidates satisfying the condition
  std::set<std::string> cited;
  for (const auto& cv : rep.per_candidate)
    if (cv.satisfies && !cv.allowed) cited.insert(cv.failed_checks.begin(), cv.failed_checks.end());
  r["cited_checks"] = cited;
  auto exp = expectation(in.test, model.name);
  r["expect"] = exp ? json(*exp) : json(nullptr);
  r["match"] = !exp || *exp == r["verdict"].get<std::string>();
  return r;
}

void print_run_table(const std::vector<json>& recs) {
  std::cout << std::left << std::setw(32) << "test" << std::setw(11) << "verdict" << std::setw(10) << "expect"
            << std::setw(12) << "candidates" << std::setw(9) << "allowed" << "checks\n";
  for (const auto& r : recs) {
    if (r.contains("error")) {
      std::cout << std::setw(32) << r["path"].get<std::string>() << "error: " << r["error"].get<std::string>()
                << "\n";
      continue;
    }
    std::string exp = r["expect"].is_null() ? "-" : r["expect"].get<std::string>();
    if (!r["match"].get<bool>()) exp += "!";
    std::string checks;
    for (const auto& c : r["cited_checks"]) checks += (checks.empty() ? "" : ",") + c.get<std::string>();
    std::cout << std::setw(32) << r["test"].get<std::string>() << std::setw(11) << r["verdict"].get<std::string>()
              << std::setw(10) << exp << std::setw(12) << r["candidates"].get<std::size_t>() << std::setw(9)
              << r["allowed"].get<std::size_t>() << checks << "\n";
  }
}

void emit(const std::vector<json>& recs, const std::string& format, void (*table)(const std::vector<json>&)) {
  if (format == "jsonl") {
    for (const auto& r : recs) std::cout << r.dump() << "\n";
  } else {
    table(recs);
  }
}

json error_record(const Input& in) { return json{{"path", in.path}, {"error", in.error}}; }

int cmd_run(const std::vector<std::string>& tests, const std::string& model_name, bool prune, bool static_ppo,
            const std::string& format) {
  BuiltinModel model = load_model(model_name);
  EvalOptions opts{static_ppo};
  auto inputs = load_inputs(tests);
  auto recs = parallel_map(inputs, [&](const Input& in) {
    if (!in.error.empty()) return error_record(in);
    try {
      return run_record(in, model, opts, prune);
    } catch (const std::exception& e) {
      return json{{"path", in.path}, {"error", e.what()}};
    }
  });
  emit(recs, format, print_run_table);
  int code = kExitOk;
  for (const auto& r : recs) {
    if (r.contains("error")) return kExitUsage;
    if (!r["match"].get<bool>()) code = kExitMismatch;
  }
  return code;
}

void print_compare_table(const std::vector<json>& recs) {
  std::size_t n = 0;
  for (const auto& r : recs) {
    if (r.contains("error")) {
      std::cout << r["path"].get<std::string>() << ": error: " << r["error"].get<std::string>() << "\n";
      continue;
    }
    if (r["divergent"].get<bool>()) ++n;
    std::cout << std::left << std::setw(32) << r["test"].get<std::string>() << std::setw(11)
              << r["a"]["verdict"].get<std::string>() << std::setw(11) << r["b"]["verdict"].get<std::string>()
              << (r["divergent"].get<bool>() ? "DIVERGES" : "same") << "\n";
    for (const char* side : {"only_a", "only_b"})
      for (const auto& s : r[side]) std::cout << "    " << side << ": " << s.get<std::string>() << "\n";
  }
  std::cout << n << " divergence(s)\n";
}

int cmd_compare(const std::vector<std::string>& tests, const std::string& a, const std::string& b,
                const std::string& format) {
  BuiltinModel ma = load_model(a), mb = load_model(b);
  auto inputs = load_inputs(tests);
  auto recs = parallel_map(inputs, [&](const Input& in) {
    if (!in.error.empty()) return error_record(in);
    json ra = run_record(in, ma, {}, false), rb = run_record(in, mb, {}, false);
    std::set<std::string> sa = ra["states"], sb = rb["states"];
    json only_a = json::array(), only_b = json::array();
    for (const auto& s : sa)
      if (!sb.count(s)) only_a.push_back(s);
    for (const auto& s : sb)
      if (!sa.count(s)) only_b.push_back(s);
    json r;
    r["test"] = in.test.name;
    r["a"] = json{{"model", ma.name}, {"verdict", ra["verdict"]}, {"check_failures", ra["check_failures"]}};
    r["b"] = json{{"model", mb.name}, {"verdict", rb["verdict"]}, {"check_failures", rb["check_failures"]}};
    r["only_a"] = only_a;
    r["only_b"] = only_b;
    r["divergent"] = ra["verdict"] != rb["verdict"] || !only_a.empty() || !only_b.empty();
    return r;
  });
  emit(recs, format, print_compare_table);
  int code = kExitOk;
  for (const auto& r : recs) {
    if (r.contains("error")) return kExitUsage;
    if (r["divergent"].get<bool>()) code = kExitMismatch;
  }
  return code;
}

void print_machine_table(const std::vector<json>& recs) {
  for (const auto& r : recs) {
    if (r.contains("error")) {
      std::cout << r["path"].get<std::string>() << ": error: " << r["error"].get<std::string>() << "\n";
      continue;
    }
    std::string status = r["status"].get<std::string>();
    std::cout << std::left << std::setw(32) << r["test"].get<std::string>() << std::setw(9) << status;
    if (status == "skipped") std::cout << "warning: " << r["reason"].get<std::string>();
    else
      std::cout << "machine=" << r["machine"].size() << " axiomatic=" << r["axiomatic"].size();
    std::cout << "\n";
    if (r.contains("trace"))
      for (const auto& l : r["trace"]) std::cout << "    " << l.get<std::string>() << "\n";
  }
}

json behaviour_json(const Program& p, const Behaviour& b) {
  std::string rf;
  for (auto [w, r] : b.rf) rf += (rf.empty() ? "" : " ") + p.event_name(w) + "->" + p.event_name(r);
  return json{{"rf", rf}, {"state", b.state}};
}

int cmd_machine(const std::vector<std::string>& tests, const std::string& model_name, std::size_t bound,
                const MachineOptions& mopts, bool trace, const std::string& format) {
  BuiltinModel model = load_model(model_name);
  auto inputs = load_inputs(tests);
  auto recs = parallel_map(inputs, [&](const Input& in) {
    if (!in.error.empty()) return error_record(in);
    json r;
    r["test"] = in.test.name;
    r["model"] = model.name;
    try {
      auto mach = enumerate_accepted(in.prog, model.ast, bound, {}, mopts);
      auto ax = axiomatic_behaviours(in.prog, model.ast);
      r["status"] = mach == ax ? "PASS" : "FAIL";
      r["machine"] = json::array();
      r["axiomatic"] = json::array();
      for (const auto& b : mach) r["machine"].push_back(behaviour_json(*in.prog, b));
      for (const auto& b : ax) r["axiomatic"].push_back(behaviour_json(*in.prog, b));
      if (trace) {
        CandidateStream stream(in.prog);
        while (auto c = stream.next()) {
          if (!eval_model(model.ast, *c).allowed || !evaluate_final(*c, in.test.final.clause)) continue;
          MachineContext ctx = machine_context(*c, model.ast, {}, mopts);
          AcceptResult res = run_path(*in.prog, witness_path(*c, ctx), ctx);
          json lines = json::array({"test " + in.test.name + " " + state_string(final_state(*c))});
          for (const auto& l : res.trace) lines.push_back(l);
          lines.push_back(res.accepted ? "accepted" : "blocked");
          r["trace"] = lines;
          break;
        }
      }
    } catch (const BoundExceeded& e) {
      r["status"] = "skipped";
      r["reason"] = e.what();
    }
    return r;
  });
  emit(recs, format, print_machine_table);
  int code = kExitOk;
  for (const auto& r : recs) {
    if (r.contains("error")) return kExitUsage;
    if (r["status"] == "skipped") std::cerr << "warning: " << r["test"].get<std::string>() << " skipped\n";
    if (r["status"] == "FAIL") code = kExitMismatch;
  }
  return code;
}

json access_json(const CycleRecord& rec, const StaticAccess& a) {
  return json{{"thread", a.thread},
              {"idx", a.po_index},
              {"dir", a.dir == Dir::W ? "W" : "R"},
              {"loc", rec.locations[a.loc]}};
}

void print_cycles_table(const std::vector<json>& recs) {
  std::map<std::pair<std::string, std::string>, std::size_t> freq;
  for (const auto& r : recs) {
    if (r.contains("error")) {
      std::cout << r["path"].get<std::string>() << ": error: " << r["error"].get<std::string>() << "\n";
      continue;
    }
    std::string name = r["name"].get<std::string>();
    std::cout << std::left << std::setw(28) << r["test"].get<std::string>() << std::setw(26) << name
              << std::setw(14) << r["systematic"].get<std::string>() << std::setw(17)
              << r["axiom"].get<std::string>() << r["sequence"].get<std::string>() << "\n";
    std::string pattern = r["classic"].is_null() ? r["systematic"].get<std::string>() : r["classic"].get<std::string>();
    ++freq[{pattern, r["axiom"].get<std::string>()}];
  }
  std::vector<std::pair<std::size_t, std::pair<std::string, std::string>>> rows;
  for (const auto& [k, v] : freq) rows.push_back({v, k});
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::cout << "\n" << std::setw(20) << "pattern" << std::setw(17) << "axiom" << "cycles\n";
  for (const auto& [n, k] : rows) std::cout << std::setw(20) << k.first << std::setw(17) << k.second << n << "\n";
}

int cmd_cycles(const std::vector<std::string>& inputs_args, const std::string& format) {
  auto inputs = load_inputs(inputs_args);
  auto per_input = parallel_map(inputs, [&](const Input& in) {
    std::vector<json> out;
    if (!in.error.empty()) {
      out.push_back(error_record(in));
      return out;
    }
    for (const auto& rec : mine(*in.prog)) {
      json r;
      r["test"] = rec.test;
      r["systematic"] = rec.name.systematic;
      r["classic"] = rec.name.classic ? json(*rec.name.classic) : json(nullptr);
      r["name"] = rec.name.full;
      r["axiom"] = axiom_name(rec.axiom);
      r["sequence"] = rec.sequence;
      r["accesses"] = json::array();
      for (const auto& a : rec.accesses) r["accesses"].push_back(access_json(rec, a));
      out.push_back(std::move(r));
    }
    return out;
  });
  std::vector<json> recs;
  bool errors = false;
  for (auto& v : per_input)
    for (auto& r : v) {
      if (r.contains("error")) {
        errors = true;
        std::cerr << r["error"].get<std::string>() << "\n";
      }
      recs.push_back(std::move(r));
    }
  emit(recs, format, print_cycles_table);
  return errors ? kExitUsage : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memcat: axiomatic and operational weak-memory model workbench"};
  app.require_subcommand(1);
  std::string format = "table";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"table", "jsonl"}));

  std::vector<std::string> tests;
  std::string model = "power", model_a, model_b;
  bool prune = false, static_ppo = false, trace = false, no_corr = false, no_prop_reads = false;
  std::size_t bound = 8;

  auto* run = app.add_subcommand("run", "Verdicts of a model on litmus tests");
  run->add_option("-m,--model", model, "Model name or .cat file")->required();
  run->add_flag("--prune-sc-per-location", prune, "Drop candidates violating sc-per-location early");
  run->add_flag("--static-ppo", static_ppo, "Bind rdw and detour to the empty relation");
  run->add_option("tests", tests, "Litmus files, directories or bundled test names")->required();

  auto* cmp = app.add_subcommand("compare", "States and verdicts on which two models differ");
  cmp->add_option("-a", model_a, "First model")->required();
  cmp->add_option("-b", model_b, "Second model")->required();
  cmp->add_option("tests", tests)->required();

  auto* mach = app.add_subcommand("machine", "Operational machine against the axiomatic model");
  mach->add_option("--bound", bound, "Maximum number of memory events")->check(CLI::PositiveNumber);
  mach->add_option("-m,--model", model, "Model providing ppo, fences, prop and hb");
  mach->add_flag("--no-corr", no_corr, "Track committed reads as a plain set (coRR not rejected)");
  mach->add_flag("--no-prop-reads", no_prop_reads, "Only the premises of the base machine, prop on writes");
  mach->add_flag("--trace", trace, "Dump the witness path of a candidate satisfying the condition");
  mach->add_option("tests", tests)->required();

  auto* cyc = app.add_subcommand("cycles", "Mine, name and classify critical cycles");
  cyc->add_option("inputs", tests)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(tests, model, prune, static_ppo, format);
    if (*cmp) return cmd_compare(tests, model_a, model_b, format);
    if (*mach) return cmd_machine(tests, model, bound, MachineOptions{!no_corr, !no_prop_reads}, trace, format);
    if (*cyc) return cmd_cycles(tests, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
