#pragma once

#include <string>
#include <vector>

#include "memcat/cat.hpp"

namespace memcat {

struct BuiltinModel {
  std::string name;
  std::string text;
  std::string notes;  // leading comment block of the file
  ModelAst ast;
};

// Supported architecture models, in report order.
const std::vector<std::string>& builtin_model_names();
// Also loadable by name, but not one of the supported architectures.
const std::vector<std::string>& extra_model_names();

std::string models_dir();
BuiltinModel load_builtin(const std::string& name);
// A builtin name, or a path to a model file.
BuiltinModel load_model(const std::string& name_or_path);
BuiltinModel model_from_text(const std::string& name, const std::string& text);

}  // namespace memcat
