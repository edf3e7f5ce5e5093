#include "mrgen/aligner.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

namespace {

bool is_number_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_currency_symbol(const std::string& t) {
  return t == "£" || t == "$" || t == "€" || t == "¥";
}

bool is_negation_token(const std::string& t) {
  if (t == "not" || t == "non" || t == "no" || t == "never") return true;
  return t.size() >= 3 && t.compare(t.size() - 3, 3, "n't") == 0;
}

std::string flip_polarity(const std::string& v) { return v == "yes" ? "no" : "yes"; }

AlignmentRule lexeme_rule(const std::string& slot, const std::string& value,
                          std::vector<std::string> phrases, const std::string& desc) {
  AlignmentRule r;
  r.slot = slot;
  r.kind = AlignmentRule::Kind::lexeme;
  r.value = value;
  r.phrases = std::move(phrases);
  r.description = desc;
  return r;
}

}  // namespace

const std::vector<AlignmentRule>& default_alignment_rules() {
  static const std::vector<AlignmentRule> rules = [] {
    std::vector<AlignmentRule> r;
    // priceRange: currency chunks plus bucket lexemes.
    {
      AlignmentRule cur;
      cur.slot = "pricerange";
      cur.kind = AlignmentRule::Kind::currency;
      cur.description = "currency symbols and amounts";
      r.push_back(cur);
    }
    r.push_back(lexeme_rule("pricerange", "cheap",
                            {"cheap", "inexpensive", "low-priced", "low priced", "affordable",
                             "bargain"},
                            "cheap bucket"));
    r.push_back(lexeme_rule("pricerange", "moderate",
                            {"moderate", "moderately priced", "moderately-priced", "mid-priced",
                             "mid priced", "reasonably priced", "average priced",
                             "moderate price range", "moderately"},
                            "moderate bucket"));
    r.push_back(lexeme_rule("pricerange", "high",
                            {"high priced", "high-priced", "expensive", "pricey", "high-end",
                             "upscale", "costly", "high price range"},
                            "high bucket"));
    r.push_back(lexeme_rule("pricerange", "",
                            {"price", "prices", "priced", "price range", "pricing"},
                            "generic price lexemes"));
    // customer_rating buckets, word and numeric values.
    {
      AlignmentRule num;
      num.slot = "customer_rating";
      num.kind = AlignmentRule::Kind::numeric_range;
      num.description = "'N out of M' and 'N star' ratings";
      r.push_back(num);
    }
    r.push_back(lexeme_rule("customer_rating", "low",
                            {"low", "poor", "bad", "low-rated", "poorly rated", "one star"},
                            "low rating"));
    r.push_back(lexeme_rule("customer_rating", "average",
                            {"average", "ok", "okay", "decent", "three star", "average-rated"},
                            "average rating"));
    r.push_back(lexeme_rule("customer_rating", "high",
                            {"high", "excellent", "great", "five star", "highly rated",
                             "high-rated", "top-rated"},
                            "high rating"));
    r.push_back(lexeme_rule("customer_rating", "1 out of 5",
                            {"low", "low-rated", "poor", "one star", "1 star"}, "1/5 rating"));
    r.push_back(lexeme_rule("customer_rating", "3 out of 5",
                            {"average", "three star", "3 star", "average-rated"}, "3/5 rating"));
    r.push_back(lexeme_rule("customer_rating", "5 out of 5",
                            {"high", "excellent", "five star", "5 star", "top-rated"},
                            "5/5 rating"));
    r.push_back(lexeme_rule("customer_rating", "",
                            {"rating", "rated", "ratings", "customer rating"},
                            "generic rating lexemes"));
    // familyFriendly polarity; negation in a 3-token window flips it.
    r.push_back(lexeme_rule("familyfriendly", "yes",
                            {"family-friendly", "family friendly", "kid-friendly", "kid friendly",
                             "child-friendly", "child friendly", "children-friendly",
                             "children friendly", "family oriented", "kids are welcome",
                             "welcomes kids", "welcomes families", "good for kids",
                             "suitable for kids", "suitable for children", "for the whole family"},
                            "family-friendly phrases"));
    r.push_back(lexeme_rule("familyfriendly", "no",
                            {"adults only", "adult only", "not for kids", "no kids",
                             "no children"},
                            "explicitly not family-friendly"));
    // eatType realizations.
    r.push_back(lexeme_rule("eattype", "restaurant", {"restaurant", "eatery"}, "restaurant"));
    r.push_back(lexeme_rule("eattype", "coffee shop",
                            {"coffee shop", "cafe", "café", "coffee house"}, "coffee shop"));
    r.push_back(lexeme_rule("eattype", "pub", {"pub", "bar", "public house"}, "pub"));
    // area realizations.
    r.push_back(lexeme_rule("area", "city centre",
                            {"city centre", "city center", "centre of the city",
                             "center of the city", "town centre", "centre of town", "downtown"},
                            "city centre"));
    r.push_back(lexeme_rule("area", "riverside",
                            {"riverside", "river side", "by the river", "near the river",
                             "on the river", "riverbank", "along the river"},
                            "riverside"));
    return r;
  }();
  return rules;
}

std::vector<AlignmentRule> load_alignment_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rules file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::vector<AlignmentRule> rules;
  for (const auto& node : doc.at("rules")) {
    AlignmentRule r;
    r.slot = canonical_slot(node.at("slot").get<std::string>());
    std::string kind = node.value("type", "lexeme");
    if (kind == "lexeme")
      r.kind = AlignmentRule::Kind::lexeme;
    else if (kind == "currency")
      r.kind = AlignmentRule::Kind::currency;
    else if (kind == "numeric_range")
      r.kind = AlignmentRule::Kind::numeric_range;
    else
      throw ConfigError(path + ": unknown rule type '" + kind + "'");
    r.value = node.value("value", "");
    if (node.contains("phrases"))
      for (const auto& p : node.at("phrases")) r.phrases.push_back(p.get<std::string>());
    r.description = node.value("description", "");
    rules.push_back(std::move(r));
  }
  return rules;
}

SynonymLexicon load_synonym_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synonym lexicon " + path);
  SynonymLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected phrase<TAB>slot[value]");
    std::string phrase = normalize_tokens(line.substr(0, tab));
    std::string target = normalize_ws(line.substr(tab + 1));
    auto open = target.find('[');
    if (open == std::string::npos || target.back() != ']')
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected slot[value]");
    SynonymLexicon::Entry e;
    e.phrase = phrase;
    e.slot = canonical_slot(target.substr(0, open));
    e.value = target.substr(open + 1, target.size() - open - 2);
    if (e.phrase.empty() || e.slot.empty())
      throw ParseError(path + ":" + std::to_string(lineno) + ": empty phrase or slot");
    lex.entries.push_back(std::move(e));
  }
  return lex;
}

void Gazetteer::add_phrase(const std::string& slot, const std::string& value,
                           const std::string& phrase, PhraseSource source) {
  std::string norm = normalize_tokens(phrase);
  if (norm.empty()) return;
  auto& vec = by_phrase_[norm];
  std::string vnorm = normalize_tokens(value);
  for (const auto& e : vec)
    if (e.slot == slot && e.value == vnorm) return;
  vec.push_back({slot, vnorm, source});
  std::size_t ntoks = static_cast<std::size_t>(std::count(norm.begin(), norm.end(), ' ')) + 1;
  max_phrase_tokens_ = std::max(max_phrase_tokens_, ntoks);
}

void Gazetteer::add_pattern_rule(const AlignmentRule& rule) { pattern_rules_.push_back(rule); }

const std::vector<Gazetteer::PhraseInfo>* Gazetteer::lookup(const std::string& phrase) const {
  auto it = by_phrase_.find(phrase);
  return it == by_phrase_.end() ? nullptr : &it->second;
}

std::set<std::string> Gazetteer::phrases_for(const std::string& slot) const {
  std::set<std::string> out;
  for (const auto& [phrase, infos] : by_phrase_)
    for (const auto& info : infos)
      if (info.slot == slot) out.insert(phrase);
  return out;
}

Gazetteer build_gazetteer(const Dataset& train, const SynonymLexicon& lexicon,
                          const std::vector<AlignmentRule>& rules) {
  Gazetteer gaz;
  std::set<std::string> slot_types;

  for (const auto& sample : train.samples) {
    auto ref_tokens = tokenize(sample.reference).tokens;
    for (const auto& sv : sample.mr.slots) {
      slot_types.insert(sv.slot);
      if (sv.value.empty()) continue;
      auto val_tokens = tokenize(sv.value).tokens;
      if (val_tokens.empty() || val_tokens.size() > ref_tokens.size()) continue;
      bool found = false;
      for (std::size_t i = 0; i + val_tokens.size() <= ref_tokens.size() && !found; ++i)
        found = std::equal(val_tokens.begin(), val_tokens.end(), ref_tokens.begin() + i);
      if (found) gaz.add_phrase(sv.slot, sv.value, sv.value, PhraseSource::observed);
    }
  }

  for (const auto& rule : rules) {
    if (rule.kind == AlignmentRule::Kind::lexeme) {
      for (const auto& phrase : rule.phrases)
        gaz.add_phrase(rule.slot, rule.value, phrase, PhraseSource::rule);
    } else {
      gaz.add_pattern_rule(rule);
    }
  }

  for (const auto& e : lexicon.entries)
    gaz.add_phrase(e.slot, e.value, e.phrase, PhraseSource::synonym);

  for (const auto& slot : slot_types)
    gaz.add_phrase(slot, "", "slot_" + slot, PhraseSource::placeholder);

  return gaz;
}

std::size_t AlignmentReport::aligned_count() const {
  std::size_t n = 0;
  for (const auto& sent : per_sentence) n += sent.size();
  return n;
}

std::optional<int> AlignmentReport::sentence_of(const std::string& slot) const {
  for (std::size_t s = 0; s < per_sentence.size(); ++s)
    for (const auto& m : per_sentence[s])
      if (m.slot == slot) return static_cast<int>(s);
  return std::nullopt;
}

namespace {

struct RawMatch {
  std::string slot;
  std::string value;  // normalized; empty = value-independent
  int sentence = 0;
  int begin = 0;
  int end = 0;
  std::string phrase;
  bool negated = false;
};

void scan_pattern_rules(const Gazetteer& gaz, const std::vector<std::string>& toks, int sent,
                        std::vector<RawMatch>& out) {
  for (const auto& rule : gaz.pattern_rules()) {
    if (rule.kind == AlignmentRule::Kind::currency) {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (is_currency_symbol(toks[i]) && i + 1 < toks.size() && is_number_token(toks[i + 1])) {
          out.push_back({rule.slot, "", sent, static_cast<int>(i), static_cast<int>(i + 2),
                         toks[i] + " " + toks[i + 1], false});
        } else if (is_number_token(toks[i]) && i + 1 < toks.size() &&
                   (toks[i + 1] == "pounds" || toks[i + 1] == "dollars" ||
                    toks[i + 1] == "euros")) {
          out.push_back({rule.slot, "", sent, static_cast<int>(i), static_cast<int>(i + 2),
                         toks[i] + " " + toks[i + 1], false});
        }
      }
    } else if (rule.kind == AlignmentRule::Kind::numeric_range) {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i + 3 < toks.size() && is_number_token(toks[i]) && toks[i + 1] == "out" &&
            toks[i + 2] == "of" && is_number_token(toks[i + 3])) {
          std::string phrase =
              toks[i] + " " + toks[i + 1] + " " + toks[i + 2] + " " + toks[i + 3];
          out.push_back({rule.slot, phrase, sent, static_cast<int>(i), static_cast<int>(i + 4),
                         phrase, false});
        } else if (i + 1 < toks.size() && is_number_token(toks[i]) &&
                   (toks[i + 1] == "star" || toks[i + 1] == "stars")) {
          out.push_back({rule.slot, "", sent, static_cast<int>(i), static_cast<int>(i + 2),
                         toks[i] + " " + toks[i + 1], false});
        }
      }
    }
  }
}

bool negated_at(const std::vector<std::string>& toks, int begin) {
  for (int k = std::max(0, begin - 3); k < begin; ++k)
    if (is_negation_token(toks[k])) return true;
  return false;
}

}  // namespace

AlignmentReport align_utterance(const std::string& utterance, const MeaningRepresentation& mr,
                                const Gazetteer& gaz) {
  AlignmentReport report;
  report.total_slots = mr.slots.size();

  auto sentences = split_sentences(utterance);
  report.per_sentence.resize(sentences.size());

  // The MR's own values are always candidate realizations.
  std::unordered_map<std::string, std::vector<std::size_t>> implicit;  // value norm -> slot idx
  for (std::size_t si = 0; si < mr.slots.size(); ++si) {
    std::string vnorm = normalize_tokens(mr.slots[si].value);
    if (!vnorm.empty()) implicit[vnorm].push_back(si);
  }

  std::vector<RawMatch> matches;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto toks = tokenize(sentences[s]).tokens;
    std::size_t maxlen = std::max<std::size_t>(gaz.max_phrase_tokens(), 4);
    for (std::size_t len = std::min(maxlen, toks.size()); len >= 1; --len) {
      for (std::size_t i = 0; i + len <= toks.size(); ++i) {
        std::string joined = toks[i];
        for (std::size_t k = 1; k < len; ++k) joined += " " + toks[i + k];
        bool neg = negated_at(toks, static_cast<int>(i));
        if (len == 1) {
          if (auto ph = parse_placeholder(joined)) {
            matches.push_back({ph->slot, "", static_cast<int>(s), static_cast<int>(i),
                               static_cast<int>(i + 1), joined, false});
          }
        }
        if (const auto* infos = gaz.lookup(joined)) {
          for (const auto& info : *infos)
            matches.push_back({info.slot, info.value, static_cast<int>(s), static_cast<int>(i),
                               static_cast<int>(i + len), joined, neg});
        }
        auto imp = implicit.find(joined);
        if (imp != implicit.end()) {
          for (std::size_t si : imp->second)
            matches.push_back({mr.slots[si].slot, joined, static_cast<int>(s),
                               static_cast<int>(i), static_cast<int>(i + len), joined, neg});
        }
      }
    }
    scan_pattern_rules(gaz, toks, static_cast<int>(s), matches);
  }

  // Assign each MR slot instance to its best compatible match.
  for (std::size_t si = 0; si < mr.slots.size(); ++si) {
    const auto& sv = mr.slots[si];
    std::string mr_value = normalize_tokens(sv.value);
    const RawMatch* best = nullptr;
    for (const auto& m : matches) {
      if (m.slot != sv.slot) continue;
      bool compatible;
      if (m.value.empty()) {
        compatible = true;
      } else if ((m.value == "yes" || m.value == "no") &&
                 (mr_value == "yes" || mr_value == "no")) {
        std::string implied = m.negated ? flip_polarity(m.value) : m.value;
        compatible = implied == mr_value;
      } else {
        compatible = m.value == mr_value;
      }
      if (!compatible) continue;
      if (!best) {
        best = &m;
        continue;
      }
      int blen = best->end - best->begin, mlen = m.end - m.begin;
      if (mlen > blen ||
          (mlen == blen && (m.sentence < best->sentence ||
                            (m.sentence == best->sentence && m.begin < best->begin))))
        best = &m;
    }
    if (!best) {
      report.unaligned_slots.push_back(sv.slot);
      continue;
    }
    report.per_sentence[best->sentence].push_back(
        {sv.slot, best->sentence, best->begin, best->end, best->phrase});
  }

  // Matched phrases whose slot is absent from the MR are over-generated;
  // keep maximal spans only, one mention per distinct span.
  std::vector<RawMatch> over;
  for (const auto& m : matches) {
    if (mr.has_slot(m.slot)) continue;
    bool contained = false;
    for (const auto& o : over) {
      if (o.slot == m.slot && o.sentence == m.sentence && o.begin <= m.begin && m.end <= o.end) {
        contained = true;
        break;
      }
    }
    if (contained) continue;
    // Remove previously kept spans now contained in this one.
    over.erase(std::remove_if(over.begin(), over.end(),
                              [&](const RawMatch& o) {
                                return o.slot == m.slot && o.sentence == m.sentence &&
                                       m.begin <= o.begin && o.end <= m.end &&
                                       (o.begin != m.begin || o.end != m.end);
                              }),
               over.end());
    bool dup = std::any_of(over.begin(), over.end(), [&](const RawMatch& o) {
      return o.slot == m.slot && o.sentence == m.sentence && o.begin == m.begin && o.end == m.end;
    });
    if (!dup) over.push_back(m);
  }
  for (const auto& o : over)
    report.overgenerated.push_back({o.slot, o.sentence, o.begin, o.end, o.phrase});

  return report;
}

const std::vector<std::string>& default_pronouns() {
  static const std::vector<std::string> pronouns = {"it", "its", "they", "their"};
  return pronouns;
}

bool label_coreference(const std::string& sentence, const std::string& name_value) {
  return label_coreference(sentence, name_value, default_pronouns());
}

bool label_coreference(const std::string& sentence, const std::string& name_value,
                       const std::vector<std::string>& pronouns) {
  auto toks = tokenize(sentence).tokens;
  for (const auto& t : toks)
    for (const auto& p : pronouns)
      if (t == p) return true;
  auto name_toks = tokenize(name_value).tokens;
  if (name_toks.empty() || name_toks.size() > toks.size()) return false;
  for (std::size_t i = 0; i + name_toks.size() <= toks.size(); ++i)
    if (std::equal(name_toks.begin(), name_toks.end(), toks.begin() + i)) return true;
  return false;
}

}  // namespace mrgen
