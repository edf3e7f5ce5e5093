#include "doctest.h"
#include "mrgen/error.hpp"
#include "mrgen/styleselect.hpp"
#include "mrgen/text.hpp"

using namespace mrgen;

namespace {

const std::string kSimple =
    "Wildwood provides English food for a moderate price. It has a low customer rating and is "
    "located near Ranch. It is a coffee shop.";
const std::string kElegant =
    "A low-rated English style coffee shop around Ranch, called Wildwood, has moderately priced "
    "food.";

}  // namespace

TEST_CASE("profile detects contrast and aggregation in generated-style text") {
  auto p = profile_utterance(
      "The Cricketers is a cheap Chinese restaurant near All Bar One in the riverside area, "
      "but it has an average customer rating and is not family friendly.");
  CHECK(p.contrastive_cues >= 1);
  CHECK(p.aggregation_markers >= 1);
  CHECK(p.sentence_count == 1);
}

TEST_CASE("profile of a bare sentence is all zeros") {
  auto p = profile_utterance("It is a coffee shop.");
  CHECK(p.contrastive_cues == 0);
  CHECK(p.subordinate_markers == 0);
  CHECK(p.aggregation_markers == 0);
  CHECK(p.apposition_markers == 0);
  CHECK(p.sentence_count == 1);
}

TEST_CASE("profile finds the apposition in the one-sentence style") {
  auto p = profile_utterance(kElegant);
  CHECK(p.apposition_markers >= 1);
  CHECK(p.sentence_count == 1);
}

TEST_CASE("profile counts subordinate markers") {
  auto p = profile_utterance("The Phoenix is a pub which serves Italian food.");
  CHECK(p.subordinate_markers >= 1);
  // "that" counts only after a comma
  auto q = profile_utterance("a place that is fine");
  CHECK(q.subordinate_markers == 0);
  auto r = profile_utterance("a fine place, that serves sushi");
  CHECK(r.subordinate_markers == 1);
}

TEST_CASE("profile sees a comma-delimited name placeholder as apposition") {
  auto p = profile_utterance("Near the river , slot_name , serves coffee .");
  CHECK(p.apposition_markers >= 1);
}

TEST_CASE("profile is case-insensitive") {
  auto lower = profile_utterance(to_lower(kSimple));
  auto orig = profile_utterance(kSimple);
  CHECK(lower.contrastive_cues == orig.contrastive_cues);
  CHECK(lower.subordinate_markers == orig.subordinate_markers);
  CHECK(lower.aggregation_markers == orig.aggregation_markers);
  CHECK(lower.apposition_markers == orig.apposition_markers);
  CHECK(lower.sentence_count == orig.sentence_count);
}

TEST_CASE("complexity_score arithmetic") {
  SelectionPolicy policy;
  DiscourseProfile zero;
  CHECK(complexity_score(zero, policy) == doctest::Approx(0.0));

  DiscourseProfile p = zero;
  p.sentence_count = 3;
  DiscourseProfile q = zero;
  q.sentence_count = 1;
  CHECK(complexity_score(p, policy) < complexity_score(q, policy));

  // Cue counts monotonically raise the score.
  DiscourseProfile r = zero;
  r.contrastive_cues = 2;
  CHECK(complexity_score(r, policy) > complexity_score(zero, policy));
}

TEST_CASE("the elegant reference strictly outscores the simple one") {
  SelectionPolicy policy;
  double elegant = complexity_score(profile_utterance(kElegant), policy);
  double simple = complexity_score(profile_utterance(kSimple), policy);
  CHECK(elegant > simple);
}

TEST_CASE("select_references keeps the best references per MR") {
  Dataset ds;
  ds.split = Split::train;
  auto add = [&](const std::string& mr, const std::string& ref) {
    Sample s;
    s.mr = parse_mr(mr, Dialect::e2e);
    s.reference = ref;
    s.id = std::to_string(ds.samples.size());
    ds.samples.push_back(s);
  };
  std::string mr =
      "name[Wildwood], eatType[coffee shop], food[English], priceRange[moderate], "
      "customer rating[1 out of 5], near[Ranch]";
  add(mr, kSimple);
  add(mr, kElegant);
  add(mr, "Wildwood is a coffee shop. It serves English food. It is near Ranch.");
  add("name[Solo], food[French]", "Solo serves French food.");  // single reference survives

  SelectionPolicy policy;
  policy.top_n = 1;
  auto out = select_references(ds, policy);
  REQUIRE(out.samples.size() == 2);
  CHECK(out.samples[0].reference == kElegant);
  CHECK(out.samples[1].reference == "Solo serves French food.");

  policy.top_n = SelectionPolicy::kUnlimited;
  auto all = select_references(ds, policy);
  CHECK(all.samples.size() == ds.samples.size());
}

TEST_CASE("select_references refuses non-train splits") {
  Dataset ds;
  ds.split = Split::validation;
  Sample s;
  s.mr = parse_mr("name[A]", Dialect::e2e);
  s.reference = "A.";
  ds.samples.push_back(s);
  CHECK_THROWS_AS(select_references(ds, SelectionPolicy{}), ConfigError);
}
