#pragma once

#include <memory>
#include <string>
#include <vector>

#include "memcat/candidate.hpp"
#include "memcat/litmus.hpp"

namespace memcat {

std::string litmus_dir();  // MEMCAT_LITMUS_DIR or the bundled directory

struct CorpusEntry {
  std::string path;
  LitmusTest test;
  std::shared_ptr<const Program> prog;
};

// every *.litmus file under dir, sorted by test name
std::vector<CorpusEntry> load_corpus(const std::string& dir = litmus_dir());
const CorpusEntry& find_test(const std::vector<CorpusEntry>& corpus, const std::string& name);

}  // namespace memcat
