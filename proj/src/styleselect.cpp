#include "mrgen/styleselect.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "mrgen/delex.hpp"
#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

const CueLexicon& default_cue_lexicon() {
  static const CueLexicon lex;
  return lex;
}

CueLexicon load_cue_lexicon(const std::string& dir) {
  CueLexicon lex;
  auto load = [&](const std::string& name, std::vector<std::string>& plain,
                  std::vector<std::string>* after_comma) {
    std::ifstream in(dir + "/" + name);
    if (!in) throw IoError("cannot open cue file " + dir + "/" + name);
    plain.clear();
    if (after_comma) after_comma->clear();
    std::string line;
    while (std::getline(in, line)) {
      line = normalize_ws(line);
      if (line.empty() || line[0] == '#') continue;
      auto sp = line.find(" @after_comma");
      if (sp != std::string::npos && after_comma) {
        after_comma->push_back(to_lower(line.substr(0, sp)));
      } else {
        plain.push_back(to_lower(line));
      }
    }
  };
  load("cues_contrastive.txt", lex.contrastive, nullptr);
  load("cues_subordinate.txt", lex.subordinate_any, &lex.subordinate_after_comma);
  load("cues_aggregation_verbs.txt", lex.aggregation_verbs, nullptr);
  load("cues_apposition.txt", lex.apposition_cues, nullptr);
  return lex;
}

DiscourseProfile profile_utterance(const std::string& utterance) {
  return profile_utterance(utterance, default_cue_lexicon());
}

DiscourseProfile profile_utterance(const std::string& utterance, const CueLexicon& cues) {
  DiscourseProfile p;
  auto sentences = split_sentences_anycase(utterance);
  p.sentence_count = std::max<int>(1, static_cast<int>(sentences.size()));

  auto contains = [](const std::vector<std::string>& v, const std::string& t) {
    return std::find(v.begin(), v.end(), t) != v.end();
  };

  for (const auto& sentence : sentences) {
    auto toks = tokenize(sentence).tokens;
    p.token_count += static_cast<int>(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const std::string& t = toks[i];
      if (contains(cues.contrastive, t)) ++p.contrastive_cues;
      if (contains(cues.subordinate_any, t)) ++p.subordinate_markers;
      if (i > 0 && toks[i - 1] == "," && contains(cues.subordinate_after_comma, t))
        ++p.subordinate_markers;
      if (t == "and" && i + 1 < toks.size() && contains(cues.aggregation_verbs, toks[i + 1]))
        ++p.aggregation_markers;
      if (i > 0 && toks[i - 1] == "," && contains(cues.apposition_cues, t))
        ++p.apposition_markers;
      // A name placeholder set off by commas is an apposition.
      if (i > 0 && i + 1 < toks.size() && toks[i - 1] == "," && toks[i + 1] == ",") {
        if (auto ph = parse_placeholder(t); ph && ph->slot == "name") ++p.apposition_markers;
      }
    }
  }
  return p;
}

double complexity_score(const DiscourseProfile& profile, const SelectionPolicy& policy) {
  double score = policy.contrastive_weight * profile.contrastive_cues +
                 policy.apposition_weight * profile.apposition_markers +
                 policy.subordinate_weight * profile.subordinate_markers +
                 policy.aggregation_weight * profile.aggregation_markers;
  score -= policy.sentence_penalty * (profile.sentence_count - 1);
  return score;
}

Dataset select_references(const Dataset& dataset, const SelectionPolicy& policy) {
  return select_references(dataset, policy, default_cue_lexicon());
}

Dataset select_references(const Dataset& dataset, const SelectionPolicy& policy,
                          const CueLexicon& cues) {
  if (dataset.split != Split::train)
    throw ConfigError("select_references applies to the train split only");

  struct Scored {
    std::size_t index;
    double score;
    int sentences;
    int tokens;
  };
  std::map<std::string, std::vector<Scored>> groups;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& s = dataset.samples[i];
    auto profile = profile_utterance(s.reference, cues);
    groups[mr_group_key(s.mr)].push_back(
        {i, complexity_score(profile, policy), profile.sentence_count, profile.token_count});
  }

  std::vector<std::size_t> keep;
  for (auto& [key, scored] : groups) {
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.sentences != b.sentences) return a.sentences < b.sentences;
      if (a.tokens != b.tokens) return a.tokens < b.tokens;
      return a.index < b.index;
    });
    std::size_t n = scored.size();
    if (policy.mode == SelectionPolicy::Mode::top_per_mr) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, policy.top_n)));
    } else {
      std::size_t above = 0;
      for (const auto& sc : scored)
        if (sc.score >= policy.threshold) ++above;
      n = std::max<std::size_t>(1, above);  // never drop an MR entirely
    }
    for (std::size_t j = 0; j < n; ++j) keep.push_back(scored[j].index);
  }
  std::sort(keep.begin(), keep.end());

  Dataset out;
  out.domain = dataset.domain;
  out.split = dataset.split;
  out.samples.reserve(keep.size());
  for (std::size_t i : keep) out.samples.push_back(dataset.samples[i]);
  return out;
}

}  // namespace mrgen
