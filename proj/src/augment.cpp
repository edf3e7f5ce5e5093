#include "mrgen/augment.hpp"

#include <algorithm>
#include <set>

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

std::vector<Sample> split_sample(const Sample& sample, const Gazetteer& gaz,
                                 const SplitConfig& cfg) {
  auto sentences = split_sentences(sample.reference);
  auto report = align_utterance(sample.reference, sample.mr, gaz);

  std::vector<Sample> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::set<std::string> sentence_slots;
    for (const auto& m : report.per_sentence[s]) sentence_slots.insert(m.slot);

    bool add_name = false;
    if (auto name_value = sample.mr.value_of("name")) {
      if (!sentence_slots.count("name") &&
          label_coreference(sentences[s], *name_value, cfg.pronouns))
        add_name = true;
    }
    if (sentence_slots.empty() && !add_name) continue;

    Sample sub;
    sub.reference = sentences[s];
    sub.id = sample.id + ".s" + std::to_string(s);
    sub.mr.da_type = sample.mr.da_type;
    sub.mr.dialect = sample.mr.dialect;
    for (const auto& sv : sample.mr.slots) {
      if (sentence_slots.count(sv.slot) || (add_name && sv.slot == "name"))
        sub.mr.slots.push_back(sv);
    }
    sub.mr.slots.push_back({cfg.position_slot_name, s == 0 ? "outer" : "inner"});
    out.push_back(std::move(sub));
  }
  return out;
}

std::optional<Sample> handle_unaligned(const Sample& sample, const AlignmentReport& report) {
  if (report.unaligned_slots.empty()) return sample;
  std::set<std::string> drop(report.unaligned_slots.begin(), report.unaligned_slots.end());
  Sample cleaned = sample;
  cleaned.mr.slots.clear();
  for (const auto& sv : sample.mr.slots)
    if (!drop.count(sv.slot)) cleaned.mr.slots.push_back(sv);
  if (cleaned.mr.slots.empty()) return std::nullopt;
  return cleaned;
}

std::vector<Sample> permute_slots(const Sample& sample, const PermutationConfig& cfg,
                                  std::mt19937_64& rng) {
  std::vector<Sample> out = {sample};
  if (cfg.k <= 0 || sample.mr.slots.size() < 2) return out;

  auto order_key = [](const std::vector<SlotValue>& slots) {
    std::string key;
    for (const auto& sv : slots) key += sv.slot + "\x1f" + sv.value + "\x1e";
    return key;
  };
  std::set<std::string> seen = {order_key(sample.mr.slots)};

  // A few extra attempts absorb duplicate draws on small slot sets.
  int attempts = cfg.k * 8;
  int produced = 0;
  auto slots = sample.mr.slots;
  while (produced < cfg.k && attempts-- > 0) {
    std::shuffle(slots.begin(), slots.end(), rng);
    if (!seen.insert(order_key(slots)).second) continue;
    Sample perm = sample;
    perm.mr.slots = slots;
    perm.id = sample.id + ".p" + std::to_string(produced);
    out.push_back(std::move(perm));
    ++produced;
  }
  return out;
}

Dataset expand_dataset(const Dataset& dataset, const Gazetteer& gaz, const SplitConfig& split_cfg,
                       const PermutationConfig& perm_cfg, bool do_split) {
  if (dataset.split != Split::train)
    throw ConfigError("expand_dataset applies to the train split only");

  Dataset out;
  out.domain = dataset.domain;
  out.split = dataset.split;
  std::mt19937_64 rng(perm_cfg.seed);

  auto slot_set = [](const MeaningRepresentation& mr) {
    std::set<std::string> s;
    for (const auto& sv : mr.slots) s.insert(sv.slot);
    return s;
  };

  for (const auto& sample : dataset.samples) {
    auto report = align_utterance(sample.reference, sample.mr, gaz);
    auto cleaned = handle_unaligned(sample, report);
    if (!cleaned) continue;

    std::vector<Sample> emitted = {*cleaned};
    if (do_split) {
      auto subs = split_sample(*cleaned, gaz, split_cfg);
      if (subs.size() == 1) {
        // A single-sentence sub-sample covering the parent's slots adds
        // nothing; keep the parent only.
        auto sub_slots = slot_set(subs[0].mr);
        sub_slots.erase(split_cfg.position_slot_name);
        if (sub_slots != slot_set(cleaned->mr))
          emitted.push_back(subs[0]);
      } else {
        for (auto& sub : subs) emitted.push_back(std::move(sub));
      }
    }
    for (const auto& s : emitted) {
      if (perm_cfg.k > 0) {
        for (auto& p : permute_slots(s, perm_cfg, rng)) out.samples.push_back(std::move(p));
      } else {
        out.samples.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace mrgen
