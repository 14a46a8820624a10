#include "memcat/models.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef MEMCAT_DEFAULT_MODELS_DIR
#define MEMCAT_DEFAULT_MODELS_DIR "models"
#endif

namespace memcat {

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names = {"sc", "tso", "cpp-ra", "power", "arm", "arm-llh"};
  return names;
}

const std::vector<std::string>& extra_model_names() {
  static const std::vector<std::string> names = {"power-as-arm"};
  return names;
}

std::string models_dir() {
  if (const char* env = std::getenv("MEMCAT_MODELS_DIR"); env && *env) return env;
  return MEMCAT_DEFAULT_MODELS_DIR;
}

BuiltinModel model_from_text(const std::string& name, const std::string& text) {
  BuiltinModel m;
  m.name = name;
  m.text = text;
  auto open = text.find("(*");
  if (open != std::string::npos && text.find_first_not_of(" \t\r\n") == open) {
    auto close = text.find("*)", open);
    if (close != std::string::npos) m.notes = text.substr(open + 2, close - open - 2);
  }
  m.ast = parse_model(text);
  check_recursive_monotone(m.ast);
  return m;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open model file " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool known(const std::string& name) {
  for (const auto* v : {&builtin_model_names(), &extra_model_names()})
    for (const auto& n : *v)
      if (n == name) return true;
  return false;
}

}  // namespace

BuiltinModel load_builtin(const std::string& name) {
  if (!known(name)) throw std::runtime_error("unknown model '" + name + "'");
  auto path = std::filesystem::path(models_dir()) / (name + ".cat");
  try {
    return model_from_text(name, slurp(path));
  } catch (const ModelError& e) {
    throw std::runtime_error(path.string() + ":" + e.what());
  }
}

BuiltinModel load_model(const std::string& name_or_path) {
  if (known(name_or_path)) return load_builtin(name_or_path);
  std::filesystem::path p(name_or_path);
  if (!std::filesystem::exists(p)) throw std::runtime_error("unknown model '" + name_or_path + "'");
  try {
    return model_from_text(p.stem().string(), slurp(p));
  } catch (const ModelError& e) {
    throw std::runtime_error(p.string() + ":" + e.what());
  }
}

}  // namespace memcat
