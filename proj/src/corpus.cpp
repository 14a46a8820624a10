#include "memcat/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#ifndef MEMCAT_DEFAULT_LITMUS_DIR
#define MEMCAT_DEFAULT_LITMUS_DIR "litmus"
#endif

namespace memcat {

std::string litmus_dir() {
  if (const char* env = std::getenv("MEMCAT_LITMUS_DIR"); env && *env) return env;
  return MEMCAT_DEFAULT_LITMUS_DIR;
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& f : std::filesystem::recursive_directory_iterator(dir)) {
    if (f.path().extension() != ".litmus") continue;
    CorpusEntry e;
    e.path = f.path().string();
    e.test = load_litmus_file(e.path);
    e.prog = build_program(e.test);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.test.name < b.test.name; });
  return out;
}

const CorpusEntry& find_test(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  for (const auto& e : corpus)
    if (e.test.name == name) return e;
  throw std::runtime_error("no bundled test named " + name);
}

}  // namespace memcat
