#include "mrgen/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "mrgen/error.hpp"

namespace mrgen {

void SyntheticGrammar::validate() const {
  if (slots.empty() || slots[0].name != "name")
    throw GrammarError("grammar needs a leading 'name' slot");
  for (const auto& s : slots)
    if (s.values.empty()) throw GrammarError("slot '" + s.name + "' has no values");
  if (slot_count_distribution.empty()) throw GrammarError("empty slot count distribution");
  double total = 0.0;
  for (const auto& [count, p] : slot_count_distribution) {
    if (count < 1 || count > static_cast<int>(slots.size()))
      throw GrammarError("slot count " + std::to_string(count) + " outside the inventory");
    if (p < 0.0) throw GrammarError("negative probability in slot count distribution");
    total += p;
  }
  if (total <= 0.0) throw GrammarError("slot count distribution sums to zero");
  if (references_per_mr < 1) throw GrammarError("references_per_mr must be >= 1");
}

const SyntheticGrammar& default_synthetic_grammar() {
  static const SyntheticGrammar grammar = [] {
    SyntheticGrammar g;
    g.da_type = "inform";
    g.slots = {
        {"name",
         {"The Phoenix", "Blue Spice", "The Punter", "The Cricketers", "Giraffe", "The Vaults",
          "Loch Fyne", "The Cambridge Blue", "The Eagle", "Bibimbap House"}},
        {"eattype", {"restaurant", "coffee shop", "pub"}},
        {"food", {"Italian", "Japanese", "English", "French", "Indian", "Chinese", "fast food"}},
        {"pricerange", {"cheap", "moderate", "expensive"}},
        {"customer_rating", {"low", "average", "high", "3 out of 5", "5 out of 5"}},
        {"area", {"city centre", "riverside"}},
        {"familyfriendly", {"yes", "no"}},
        {"near", {"The Bakers", "Ranch", "All Bar One", "The Rice Boat", "The Sorrento",
                  "Burning Torch"}},
    };
    // Mirrors the 3..8-slot spread of the restaurant corpus.
    g.slot_count_distribution = {{3, 0.05}, {4, 0.18}, {5, 0.32}, {6, 0.28}, {7, 0.14}, {8, 0.03}};
    g.references_per_mr = 2;
    return g;
  }();
  return grammar;
}

SyntheticGrammar load_synthetic_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grammar " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw GrammarError(path + ": " + e.what());
  }
  SyntheticGrammar g;
  g.da_type = doc.value("da_type", "inform");
  for (const auto& node : doc.at("slots")) {
    SyntheticGrammar::Slot s;
    s.name = canonical_slot(node.at("name").get<std::string>());
    for (const auto& v : node.at("values")) s.values.push_back(v.get<std::string>());
    g.slots.push_back(std::move(s));
  }
  if (doc.contains("slot_count_distribution"))
    for (const auto& [k, v] : doc.at("slot_count_distribution").items())
      g.slot_count_distribution[std::stoi(k)] = v.get<double>();
  else
    g.slot_count_distribution = default_synthetic_grammar().slot_count_distribution;
  g.references_per_mr = doc.value("references_per_mr", 2);
  g.validate();
  return g;
}

namespace {

// Verb-phrase fragment for one slot value; each fragment mentions exactly
// the phrases the aligner attributes to that slot.
std::string fragment(const std::string& slot, const std::string& value, int variant) {
  if (slot == "eattype") return "is a " + value;
  if (slot == "food") {
    if (value == "fast food") return "serves fast food";
    return variant % 2 == 0 ? "serves " + value + " food" : "offers " + value + " food";
  }
  if (slot == "pricerange")
    return variant % 2 == 0 ? "has " + value + " prices" : "is in the " + value + " price range";
  if (slot == "customer_rating") {
    bool numeric = value.find(" out of ") != std::string::npos;
    if (numeric) return "has a customer rating of " + value;
    return "has a " + value + " customer rating";
  }
  if (slot == "area") {
    if (value == "city centre") return "is in the city centre";
    return "is in the " + value + " area";
  }
  if (slot == "familyfriendly") {
    if (value == "yes") return variant % 2 == 0 ? "is family-friendly" : "is kid-friendly";
    return "is not family-friendly";
  }
  if (slot == "near") return "is near " + value;
  throw GrammarError("no realization template for slot '" + slot + "'");
}

std::string join_vps(const std::string& subject, const std::vector<std::string>& vps) {
  std::string s = subject;
  for (std::size_t i = 0; i < vps.size(); ++i) {
    if (i == 0)
      s += " " + vps[i];
    else if (i + 1 == vps.size())
      s += " and " + vps[i];
    else
      s += ", " + vps[i];
  }
  return s + ".";
}

std::string realize(const MeaningRepresentation& mr, int variant) {
  std::string name;
  std::vector<std::pair<std::string, std::string>> rest;  // (slot, vp)
  for (const auto& sv : mr.slots) {
    if (sv.slot == "name") {
      name = sv.value;
      continue;
    }
    rest.emplace_back(sv.slot, fragment(sv.slot, sv.value, variant));
  }
  if (rest.empty()) return name + " is here.";

  std::vector<std::string> vps;
  for (auto& [slot, vp] : rest) vps.push_back(vp);

  bool two_sentences = vps.size() >= 4 && variant % 2 == 1;
  if (!two_sentences) return join_vps(name, vps);

  std::size_t first = vps.size() / 2;
  std::vector<std::string> head(vps.begin(), vps.begin() + first);
  std::vector<std::string> tail(vps.begin() + first, vps.end());
  return join_vps(name, head) + " " + join_vps("It", tail);
}

}  // namespace

Dataset gen_synthetic(const SyntheticGrammar& grammar, int size, unsigned long long seed) {
  grammar.validate();
  if (size < 1) throw GrammarError("size must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total_p = 0.0;
  for (const auto& [count, p] : grammar.slot_count_distribution) total_p += p;

  auto draw_slot_count = [&]() {
    double u = unit(rng) * total_p;
    double acc = 0.0;
    int last = 1;
    for (const auto& [count, p] : grammar.slot_count_distribution) {
      acc += p;
      last = count;
      if (u <= acc) return count;
    }
    return last;
  };

  Dataset ds;
  ds.domain = Domain::synthetic;
  ds.split = Split::train;

  int variant_counter = 0;
  while (static_cast<int>(ds.samples.size()) < size) {
    int slot_count = draw_slot_count();

    MeaningRepresentation mr;
    mr.da_type = grammar.da_type;
    mr.dialect = Dialect::e2e;

    // name always present; the others drawn without replacement, canonical
    // order preserved.
    std::vector<std::size_t> optional_idx;
    for (std::size_t i = 1; i < grammar.slots.size(); ++i) optional_idx.push_back(i);
    std::shuffle(optional_idx.begin(), optional_idx.end(), rng);
    optional_idx.resize(std::min<std::size_t>(optional_idx.size(),
                                              static_cast<std::size_t>(slot_count - 1)));
    std::sort(optional_idx.begin(), optional_idx.end());

    auto pick_value = [&](const SyntheticGrammar::Slot& slot) {
      std::uniform_int_distribution<std::size_t> d(0, slot.values.size() - 1);
      return slot.values[d(rng)];
    };
    mr.slots.push_back({"name", pick_value(grammar.slots[0])});
    for (std::size_t idx : optional_idx)
      mr.slots.push_back({grammar.slots[idx].name, pick_value(grammar.slots[idx])});

    for (int r = 0; r < grammar.references_per_mr &&
                    static_cast<int>(ds.samples.size()) < size;
         ++r) {
      Sample s;
      s.mr = mr;
      s.reference = realize(mr, variant_counter + r);
      s.id = std::to_string(ds.samples.size());
      ds.samples.push_back(std::move(s));
    }
    variant_counter += grammar.references_per_mr;
  }
  return ds;
}

}  // namespace mrgen
