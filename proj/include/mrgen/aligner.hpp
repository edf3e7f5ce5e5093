#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrgen/delex.hpp"
#include "mrgen/mr.hpp"

namespace mrgen {

enum class PhraseSource { observed, rule, synonym, placeholder };

// Declarative matcher. Lexeme rules contribute phrase lists (optionally tied
// to one value, which is how binary/categorical polarity is encoded);
// currency and numeric_range rules match token patterns at alignment time.
struct AlignmentRule {
  enum class Kind { lexeme, currency, numeric_range };
  std::string slot;
  Kind kind = Kind::lexeme;
  std::string value;  // empty = any value of the slot
  std::vector<std::string> phrases;
  std::string description;
};

std::vector<AlignmentRule> load_alignment_rules(const std::string& path);
const std::vector<AlignmentRule>& default_alignment_rules();

// One entry per line: phrase<TAB>slot[value]
struct SynonymLexicon {
  struct Entry {
    std::string phrase;  // tokenizer-normalized
    std::string slot;
    std::string value;
  };
  std::vector<Entry> entries;
};

SynonymLexicon load_synonym_lexicon(const std::string& path);

class Gazetteer {
 public:
  struct PhraseInfo {
    std::string slot;
    std::string value;  // normalized; empty = value-independent
    PhraseSource source;
  };

  void add_phrase(const std::string& slot, const std::string& value, const std::string& phrase,
                  PhraseSource source);
  void add_pattern_rule(const AlignmentRule& rule);

  const std::vector<PhraseInfo>* lookup(const std::string& phrase) const;
  const std::vector<AlignmentRule>& pattern_rules() const { return pattern_rules_; }
  std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }
  std::size_t phrase_count() const { return by_phrase_.size(); }

  // Phrases registered for one slot (tests and diagnostics).
  std::set<std::string> phrases_for(const std::string& slot) const;

 private:
  std::unordered_map<std::string, std::vector<PhraseInfo>> by_phrase_;
  std::vector<AlignmentRule> pattern_rules_;
  std::size_t max_phrase_tokens_ = 1;
};

// Observed slot-value realizations from the training references, merged with
// rule and synonym entries; placeholder surfaces register as exact
// realizations of their slots.
Gazetteer build_gazetteer(const Dataset& train, const SynonymLexicon& lexicon,
                          const std::vector<AlignmentRule>& rules);

struct SlotMention {
  std::string slot;
  int sentence = 0;
  int token_begin = 0;
  int token_end = 0;  // exclusive
  std::string phrase;
};

struct AlignmentReport {
  std::vector<std::vector<SlotMention>> per_sentence;  // aligned slots per sentence
  std::vector<std::string> unaligned_slots;
  std::vector<SlotMention> overgenerated;
  std::size_t total_slots = 0;  // N

  std::size_t n_u() const { return unaligned_slots.size(); }
  std::size_t n_o() const { return overgenerated.size(); }
  std::size_t aligned_count() const;
  std::optional<int> sentence_of(const std::string& slot) const;
};

// Scans each sentence for gazetteer/rule matches, assigns every MR slot to
// the sentence with its best match (longest span, then earliest), and flags
// matched phrases whose slot is absent from the MR as over-generated. The
// MR's own values always count as candidate realizations (content overlap),
// so an empty gazetteer still aligns verbatim mentions.
AlignmentReport align_utterance(const std::string& utterance, const MeaningRepresentation& mr,
                                const Gazetteer& gaz);

const std::vector<std::string>& default_pronouns();

// True iff the sentence mentions the name value or a pronoun from the list.
bool label_coreference(const std::string& sentence, const std::string& name_value);
bool label_coreference(const std::string& sentence, const std::string& name_value,
                       const std::vector<std::string>& pronouns);

}  // namespace mrgen
