#pragma once

#include <optional>
#include <string>

#include "mrgen/augment.hpp"
#include "mrgen/delex.hpp"
#include "mrgen/nn/model.hpp"
#include "mrgen/styleselect.hpp"

namespace mrgen {

// Bundled lexicons and fixtures. Resolution order: explicit --data-root,
// MRGEN_DATA_ROOT, the compiled-in source data directory.
std::string default_data_root();

struct RunConfig {
  int version = 1;
  unsigned long long seed = 42;
  std::string data_root;        // lexicons, rules, grammars
  std::string checkpoint_root;  // where train writes submodels

  nn::Hyperparams hyper;
  std::optional<std::string> delex_policy_path;  // default policy when unset
  std::optional<std::string> rules_path;
  std::optional<std::string> synonyms_path;
  std::optional<std::string> grammar_path;
  std::optional<std::string> ensemble_path;

  SplitConfig split;
  PermutationConfig permutation;
  SelectionPolicy selection;

  DelexPolicy resolve_policy() const;
};

// Rejects unknown keys; requires a version field; checks that referenced
// files exist.
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<inline>");

}  // namespace mrgen
