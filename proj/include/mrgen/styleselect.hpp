#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mrgen/mr.hpp"

namespace mrgen {

struct DiscourseProfile {
  int contrastive_cues = 0;
  int subordinate_markers = 0;
  int aggregation_markers = 0;
  int apposition_markers = 0;
  int sentence_count = 1;
  int token_count = 0;
};

struct SelectionPolicy {
  double contrastive_weight = 2.0;
  double apposition_weight = 2.0;
  double subordinate_weight = 1.5;
  double aggregation_weight = 1.0;
  double sentence_penalty = 1.0;  // lambda
  enum class Mode { top_per_mr, threshold } mode = Mode::top_per_mr;
  int top_n = 4;
  double threshold = 0.0;

  static constexpr int kUnlimited = std::numeric_limits<int>::max();
};

// Editable cue inventories; the bundled data files mirror these defaults.
struct CueLexicon {
  std::vector<std::string> contrastive = {"but", "although", "however", "yet", "while",
                                          "whereas", "though"};
  std::vector<std::string> subordinate_any = {"which", "who", "whose", "where"};
  std::vector<std::string> subordinate_after_comma = {"that"};
  std::vector<std::string> aggregation_verbs = {
      "is",  "has",    "offers", "serves",   "provides", "was",     "are",  "comes",
      "can", "includes", "features", "boasts", "sits",     "located", "sells"};
  std::vector<std::string> apposition_cues = {"called", "named"};
};

const CueLexicon& default_cue_lexicon();
CueLexicon load_cue_lexicon(const std::string& dir);

// Counts declared lexical/positional cues; insensitive to letter case.
DiscourseProfile profile_utterance(const std::string& utterance);
DiscourseProfile profile_utterance(const std::string& utterance, const CueLexicon& cues);

// sum(weight_c * count_c) - lambda * (sentence_count - 1)
double complexity_score(const DiscourseProfile& profile, const SelectionPolicy& policy);

// Keeps the top-n scoring references per unique MR (ties: fewer sentences,
// then fewer tokens, then input order). Every MR retains at least one
// reference.
Dataset select_references(const Dataset& dataset, const SelectionPolicy& policy);
Dataset select_references(const Dataset& dataset, const SelectionPolicy& policy,
                          const CueLexicon& cues);

}  // namespace mrgen
