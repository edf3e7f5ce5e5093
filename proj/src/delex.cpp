#include "mrgen/delex.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

bool DelexPolicy::valid() const {
  for (const auto& s : delex_slots)
    if (excluded_slots.count(s)) return false;
  return true;
}

DelexPolicy default_e2e_policy() {
  DelexPolicy p;
  p.delex_slots = {"name", "near"};
  p.excluded_slots = {"pricerange", "area", "familyfriendly", "customer_rating", "eattype"};
  p.feature_slots = {"food"};
  p.cuisine_lexicon = {"italian", "japanese", "english", "french", "indian", "chinese"};
  p.article_feature_enabled = true;
  return p;
}

DelexPolicy load_delex_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open policy file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  DelexPolicy p;
  auto read_set = [&](const char* key, std::set<std::string>& out) {
    if (!doc.contains(key)) return;
    for (const auto& v : doc.at(key)) out.insert(canonical_slot(v.get<std::string>()));
  };
  read_set("delex_slots", p.delex_slots);
  read_set("excluded_slots", p.excluded_slots);
  read_set("feature_slots", p.feature_slots);
  p.article_feature_enabled = doc.value("article_feature_enabled", true);
  if (doc.contains("cuisine_lexicon")) {
    for (const auto& v : doc.at("cuisine_lexicon"))
      p.cuisine_lexicon.insert(to_lower(v.get<std::string>()));
  }
  if (doc.contains("cuisine_lexicon_file")) {
    std::string lex_path = doc.at("cuisine_lexicon_file").get<std::string>();
    if (!lex_path.empty() && lex_path[0] != '/') {
      auto slash = path.find_last_of('/');
      if (slash != std::string::npos) lex_path = path.substr(0, slash + 1) + lex_path;
    }
    std::ifstream lex(lex_path);
    if (!lex) throw IoError("cannot open cuisine lexicon " + lex_path);
    std::string line;
    while (std::getline(lex, line)) {
      line = normalize_ws(line);
      if (!line.empty() && line[0] != '#') p.cuisine_lexicon.insert(to_lower(line));
    }
  }
  if (!p.valid()) throw ConfigError(path + ": delex_slots and excluded_slots overlap");
  return p;
}

namespace {

const std::vector<std::string>& known_tags() {
  static const std::vector<std::string> tags = {"pl", "sg"};
  return tags;
}

}  // namespace

std::string PlaceholderToken::surface() const {
  std::string s = "slot";
  if (vowel_feature.has_value()) s += *vowel_feature ? "_vow" : "_con";
  if (cuisine_feature) s += "_cuisine";
  for (const auto& t : extra_tags) s += "_" + t;
  s += "_" + slot;
  return s;
}

std::optional<PlaceholderToken> parse_placeholder(std::string_view token) {
  if (token.rfind("slot_", 0) != 0) return std::nullopt;
  std::string_view rest = token.substr(5);
  PlaceholderToken t;
  if (rest.rfind("vow_", 0) == 0) {
    t.vowel_feature = true;
    rest = rest.substr(4);
  } else if (rest.rfind("con_", 0) == 0) {
    t.vowel_feature = false;
    rest = rest.substr(4);
  }
  if (rest.rfind("cuisine_", 0) == 0) {
    t.cuisine_feature = true;
    rest = rest.substr(8);
  }
  bool matched = true;
  while (matched) {
    matched = false;
    for (const auto& tag : known_tags()) {
      if (rest.size() > tag.size() + 1 && rest.rfind(tag + "_", 0) == 0) {
        t.extra_tags.push_back(tag);
        rest = rest.substr(tag.size() + 1);
        matched = true;
        break;
      }
    }
  }
  if (rest.empty()) return std::nullopt;
  t.slot = std::string(rest);
  return t;
}

PlaceholderToken placeholder_for(const std::string& slot, const std::string& value,
                                 const DelexPolicy& policy) {
  std::string cslot = canonical_slot(slot);
  if (!policy.delex_slots.count(cslot))
    throw NotDelexicalizable("slot '" + cslot + "' is not in the delexicalization set");
  PlaceholderToken t;
  t.slot = cslot;
  if (policy.article_feature_enabled && policy.feature_slots.count(cslot)) {
    for (char ch : value) {
      if (std::isalpha(static_cast<unsigned char>(ch))) {
        char lo = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        t.vowel_feature = lo == 'a' || lo == 'e' || lo == 'i' || lo == 'o' || lo == 'u';
        break;
      }
    }
    t.cuisine_feature = policy.cuisine_lexicon.count(to_lower(value)) > 0;
  }
  return t;
}

namespace {

inline bool word_char(unsigned char c) { return std::isalnum(c) != 0 || c == '_'; }

// Case-insensitive occurrences of `needle` in `hay` at word boundaries.
std::vector<std::size_t> find_occurrences(const std::string& hay_lower,
                                          const std::string& needle_lower) {
  std::vector<std::size_t> hits;
  if (needle_lower.empty()) return hits;
  std::size_t pos = 0;
  while ((pos = hay_lower.find(needle_lower, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !word_char(static_cast<unsigned char>(hay_lower[pos - 1]));
    std::size_t end = pos + needle_lower.size();
    bool right_ok = end >= hay_lower.size() || !word_char(static_cast<unsigned char>(hay_lower[end]));
    if (left_ok && right_ok) hits.push_back(pos);
    ++pos;
  }
  return hits;
}

}  // namespace

DelexSample delexicalize(const Sample& sample, const DelexPolicy& policy) {
  DelexSample out;
  out.delex_mr = sample.mr;

  struct Cand {
    std::size_t begin, end;
    std::size_t slot_index;
    std::string placeholder;
  };
  std::vector<Cand> cands;
  const std::string hay_lower = to_lower(sample.reference);

  for (std::size_t si = 0; si < sample.mr.slots.size(); ++si) {
    const auto& sv = sample.mr.slots[si];
    if (!policy.delex_slots.count(sv.slot) || sv.value.empty()) continue;
    std::string surface = placeholder_for(sv.slot, sv.value, policy).surface();
    out.delex_mr.slots[si].value = surface;
    for (std::size_t pos : find_occurrences(hay_lower, to_lower(sv.value)))
      cands.push_back({pos, pos + sv.value.size(), si, surface});
  }

  // Longest match first, then leftmost; overlaps lose.
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    std::size_t la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.slot_index < b.slot_index;
  });
  std::vector<Cand> accepted;
  for (const auto& c : cands) {
    bool overlaps = std::any_of(accepted.begin(), accepted.end(), [&](const Cand& a) {
      return c.begin < a.end && a.begin < c.end;
    });
    if (!overlaps) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Cand& a, const Cand& b) { return a.begin < b.begin; });

  std::set<std::size_t> substituted_slots;
  std::string result;
  std::size_t cursor = 0;
  for (const auto& c : accepted) {
    result += sample.reference.substr(cursor, c.begin - cursor);
    result += c.placeholder;
    cursor = c.end;
    const auto& sv = sample.mr.slots[c.slot_index];
    out.substitutions.push_back({sv.slot, sv.value, c.placeholder, c.begin, c.end, true});
    substituted_slots.insert(c.slot_index);
  }
  result += sample.reference.substr(cursor);
  out.delex_utterance = result;

  for (std::size_t si = 0; si < sample.mr.slots.size(); ++si) {
    const auto& sv = sample.mr.slots[si];
    if (!policy.delex_slots.count(sv.slot) || sv.value.empty()) continue;
    if (!substituted_slots.count(si))
      out.substitutions.push_back({sv.slot, sv.value, "", 0, 0, false});
  }
  return out;
}

std::vector<std::string> DelexSample::unsubstituted_slots() const {
  std::vector<std::string> out;
  for (const auto& s : substitutions)
    if (!s.substituted) out.push_back(s.slot);
  return out;
}

RelexResult relexicalize(std::string_view text, const MeaningRepresentation& mr,
                         const DelexPolicy&) {
  RelexResult res;
  std::string out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool at_word_start =
        word_char(c) && (i == 0 || !word_char(static_cast<unsigned char>(text[i - 1])));
    if (at_word_start) {
      std::size_t end = i;
      while (end < n && word_char(static_cast<unsigned char>(text[end]))) ++end;
      std::string_view word = text.substr(i, end - i);
      if (auto tok = parse_placeholder(word)) {
        if (auto value = mr.value_of(tok->slot)) {
          out += *value;
          i = end;
          continue;
        }
        res.orphan_placeholders.emplace_back(word);
      }
      out += word;
      i = end;
      continue;
    }
    out += text[i];
    ++i;
  }
  res.text = out;
  return res;
}

}  // namespace mrgen
