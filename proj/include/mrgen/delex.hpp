#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mrgen/mr.hpp"

namespace mrgen {

// Which slots get replaced by placeholders and how the placeholders are
// decorated. Loaded from a JSON policy file; defaults for the e2e and
// tv/laptop domains ship under data/.
struct DelexPolicy {
  std::set<std::string> delex_slots;     // e.g. {name, near}
  std::set<std::string> excluded_slots;  // never delexicalized (priceRange, area)
  std::set<std::string> feature_slots;   // slots carrying vow/con (+cuisine) features
  std::set<std::string> cuisine_lexicon; // values treated as cuisines, lowercased
  bool article_feature_enabled = true;

  bool valid() const;  // delex_slots and excluded_slots must be disjoint
};

DelexPolicy default_e2e_policy();
DelexPolicy load_delex_policy(const std::string& path);

// Placeholder surface grammar: slot[_vow|_con][_cuisine][_<tag>...]_<slotname>.
// parse_placeholder(surface(t)) == t for every feature combination.
struct PlaceholderToken {
  std::string slot;
  std::optional<bool> vowel_feature;  // set only for feature slots
  bool cuisine_feature = false;
  std::vector<std::string> extra_tags;  // generic feature-suffix mechanism

  std::string surface() const;
  bool operator==(const PlaceholderToken&) const = default;
};

std::optional<PlaceholderToken> parse_placeholder(std::string_view token);

PlaceholderToken placeholder_for(const std::string& slot, const std::string& value,
                                 const DelexPolicy& policy);

struct Substitution {
  std::string slot;
  std::string original;     // value from the MR
  std::string placeholder;  // empty when the value never occurred
  std::size_t begin = 0;    // char span in the original utterance
  std::size_t end = 0;
  bool substituted = false;
};

struct DelexSample {
  MeaningRepresentation delex_mr;  // values replaced by placeholder surfaces
  std::string delex_utterance;
  std::vector<Substitution> substitutions;

  std::vector<std::string> unsubstituted_slots() const;
};

// Longest-match, case-insensitive, word-boundary replacement of each delex
// slot's value; every occurrence is replaced. Values absent from the
// utterance are recorded as unsubstituted (noise for the aligner, not an
// error).
DelexSample delexicalize(const Sample& sample, const DelexPolicy& policy);

struct RelexResult {
  std::string text;
  std::vector<std::string> orphan_placeholders;  // no matching slot in the MR
};

// Replaces each placeholder whose slot exists in the MR by the MR value;
// orphans stay in place and are reported (over-generation signal).
RelexResult relexicalize(std::string_view text, const MeaningRepresentation& mr,
                         const DelexPolicy& policy);

}  // namespace mrgen
