#include <map>

#include "doctest.h"
#include "mrgen/aligner.hpp"
#include "mrgen/error.hpp"
#include "mrgen/metrics.hpp"
#include "mrgen/synthetic.hpp"

using namespace mrgen;

TEST_CASE("gen_synthetic is deterministic and sized") {
  auto a = gen_synthetic(default_synthetic_grammar(), 1000, 7);
  auto b = gen_synthetic(default_synthetic_grammar(), 1000, 7);
  REQUIRE(a.samples.size() == 1000);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].reference == b.samples[i].reference);
    CHECK(a.samples[i].mr == b.samples[i].mr);
  }
  auto c = gen_synthetic(default_synthetic_grammar(), 1000, 8);
  bool any_diff = false;
  for (std::size_t i = 0; i < c.samples.size(); ++i)
    if (!(c.samples[i].mr == a.samples[i].mr)) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("gold references carry zero slot error") {
  auto corpus = gen_synthetic(default_synthetic_grammar(), 1000, 7);
  auto gaz = build_gazetteer(corpus, SynonymLexicon{}, default_alignment_rules());
  std::vector<std::pair<std::string, MeaningRepresentation>> outputs;
  for (const auto& s : corpus.samples) outputs.emplace_back(s.reference, s.mr);
  CHECK(slot_error_rate(outputs, gaz, ErrMode::human_eval) == doctest::Approx(0.0));
  CHECK(slot_error_rate(outputs, gaz, ErrMode::rnnlg) == doctest::Approx(0.0));
}

TEST_CASE("every reference realizes exactly its MR slots") {
  auto corpus = gen_synthetic(default_synthetic_grammar(), 300, 13);
  auto gaz = build_gazetteer(corpus, SynonymLexicon{}, default_alignment_rules());
  for (const auto& s : corpus.samples) {
    auto report = align_utterance(s.reference, s.mr, gaz);
    CHECK(report.n_u() == 0);
    CHECK(report.n_o() == 0);
  }
}

TEST_CASE("slot counts stay within the configured range and distribution") {
  auto grammar = default_synthetic_grammar();
  auto corpus = gen_synthetic(grammar, 10000, 7);
  std::map<int, double> hist;
  for (const auto& s : corpus.samples) {
    int k = static_cast<int>(s.mr.slots.size());
    CHECK(k >= 3);
    CHECK(k <= 8);
    hist[k] += 1.0 / corpus.samples.size();
  }
  for (const auto& [count, target] : grammar.slot_count_distribution) {
    INFO("slot count ", count);
    CHECK(std::abs(hist[count] - target) < 0.05);
  }
}

TEST_CASE("grammar validation rejects broken inventories") {
  SyntheticGrammar g = default_synthetic_grammar();
  g.slots[0].values.clear();
  CHECK_THROWS_AS(g.validate(), GrammarError);

  SyntheticGrammar g2 = default_synthetic_grammar();
  g2.slot_count_distribution[99] = 0.5;
  CHECK_THROWS_AS(g2.validate(), GrammarError);

  SyntheticGrammar g3 = default_synthetic_grammar();
  g3.slots.erase(g3.slots.begin());
  CHECK_THROWS_AS(g3.validate(), GrammarError);

  CHECK_THROWS_AS(gen_synthetic(default_synthetic_grammar(), 0, 1), GrammarError);
}
