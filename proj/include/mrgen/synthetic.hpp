#pragma once

#include <map>
#include <string>
#include <vector>

#include "mrgen/mr.hpp"

namespace mrgen {

// Closed restaurant-style grammar: eight slot types, template references
// that realize exactly the MR's slots (so gold references carry no intrinsic
// slot noise).
struct SyntheticGrammar {
  struct Slot {
    std::string name;
    std::vector<std::string> values;
  };
  std::string da_type = "inform";
  std::vector<Slot> slots;                       // canonical order, name first
  std::map<int, double> slot_count_distribution; // slot count -> probability
  int references_per_mr = 2;

  void validate() const;  // throws GrammarError
};

const SyntheticGrammar& default_synthetic_grammar();
SyntheticGrammar load_synthetic_grammar(const std::string& path);

// Deterministic given (grammar, size, seed); every reference realizes each
// of its MR's slots exactly once.
Dataset gen_synthetic(const SyntheticGrammar& grammar, int size, unsigned long long seed);

}  // namespace mrgen
