#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "mrgen/aligner.hpp"
#include "mrgen/error.hpp"
#include "mrgen/metrics.hpp"
#include "mrgen/synthetic.hpp"
#include "mrgen/text.hpp"

using namespace mrgen;

// ---------------------------------------------------------------------------
// Independent desk oracles. These re-derive each metric from its definition
// with plain token-vector arithmetic; they deliberately share nothing with
// the library implementation.
// ---------------------------------------------------------------------------
namespace oracle {

using Toks = std::vector<std::string>;

Toks tok(const std::string& s) { return tokenize(s).tokens; }

std::map<Toks, int> grams(const Toks& t, std::size_t n) {
  std::map<Toks, int> m;
  if (t.size() < n) return m;
  for (std::size_t i = 0; i + n <= t.size(); ++i) m[Toks(t.begin() + i, t.begin() + i + n)]++;
  return m;
}

double bleu(const std::vector<EvalPair>& pairs, int max_n) {
  double log_sum = 0.0;
  long long c = 0, r = 0;
  std::vector<double> num(max_n + 1, 0), den(max_n + 1, 0);
  for (const auto& p : pairs) {
    Toks hyp = tok(p.hypothesis);
    c += static_cast<long long>(hyp.size());
    long long best = -1;
    for (const auto& ref : p.references) {
      long long rl = static_cast<long long>(tok(ref).size());
      long long hl = static_cast<long long>(hyp.size());
      if (best < 0 || std::llabs(rl - hl) < std::llabs(best - hl) ||
          (std::llabs(rl - hl) == std::llabs(best - hl) && rl < best))
        best = rl;
    }
    r += best;
    for (int n = 1; n <= max_n; ++n) {
      auto hg = grams(hyp, n);
      std::map<Toks, int> clip;
      for (const auto& ref : p.references)
        for (const auto& [g, cnt] : grams(tok(ref), n))
          clip[g] = std::max(clip[g], cnt);
      for (const auto& [g, cnt] : hg)
        num[n] += std::min(cnt, clip.count(g) ? clip[g] : 0);
      den[n] += static_cast<double>(hg.empty() ? 0 : static_cast<int>(hyp.size()) - n + 1);
    }
  }
  for (int n = 1; n <= max_n; ++n) {
    if (num[n] <= 0 || den[n] <= 0) return 0.0;
    log_sum += std::log(num[n] / den[n]) / max_n;
  }
  double bp = (c >= r || c == 0) ? 1.0 : std::exp(1.0 - static_cast<double>(r) / c);
  return bp * std::exp(log_sum);
}

double nist(const std::vector<EvalPair>& pairs, int max_n) {
  std::map<Toks, long long> refc;
  long long total_words = 0;
  for (const auto& p : pairs)
    for (const auto& ref : p.references) {
      Toks rt = tok(ref);
      total_words += static_cast<long long>(rt.size());
      for (int n = 1; n <= max_n; ++n)
        for (const auto& [g, cnt] : grams(rt, n)) refc[g] += cnt;
    }
  auto info = [&](const Toks& g) {
    if (!refc.count(g) || refc[g] == 0) return 0.0;
    double denom = static_cast<double>(refc[g]);
    double numer = g.size() == 1
                       ? static_cast<double>(total_words)
                       : static_cast<double>(refc.count(Toks(g.begin(), g.end() - 1))
                                                 ? refc[Toks(g.begin(), g.end() - 1)]
                                                 : 0);
    if (numer <= 0) return 0.0;
    return std::log2(numer / denom);
  };
  double score = 0.0;
  double lsys = 0.0, lref = 0.0;
  std::vector<double> num(max_n + 1, 0), den(max_n + 1, 0);
  for (const auto& p : pairs) {
    Toks hyp = tok(p.hypothesis);
    lsys += static_cast<double>(hyp.size());
    double avg = 0.0;
    for (const auto& ref : p.references) avg += static_cast<double>(tok(ref).size());
    lref += avg / static_cast<double>(p.references.size());
    for (int n = 1; n <= max_n; ++n) {
      std::map<Toks, int> clip;
      for (const auto& ref : p.references)
        for (const auto& [g, cnt] : grams(tok(ref), n)) clip[g] = std::max(clip[g], cnt);
      for (const auto& [g, cnt] : grams(hyp, n))
        if (clip.count(g)) num[n] += std::min(cnt, clip[g]) * info(g);
      if (static_cast<int>(hyp.size()) >= n)
        den[n] += static_cast<double>(static_cast<int>(hyp.size()) - n + 1);
    }
  }
  for (int n = 1; n <= max_n; ++n)
    if (den[n] > 0) score += num[n] / den[n];
  double beta = std::log(0.5) / std::pow(std::log(1.5), 2);
  double ratio = lref > 0 ? lsys / lref : 0.0;
  double bp = ratio >= 1.0 ? 1.0 : (ratio <= 0 ? 0.0 : std::exp(beta * std::pow(std::log(ratio), 2)));
  return score * bp;
}

double lcs(const Toks& a, const Toks& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] + 1
                                     : std::max(d[i - 1][j], d[i][j - 1]);
  return d[a.size()][b.size()];
}

double rouge_l(const std::vector<EvalPair>& pairs, double beta) {
  double total = 0.0;
  for (const auto& p : pairs) {
    Toks hyp = tok(p.hypothesis);
    double best = 0.0;
    for (const auto& ref : p.references) {
      Toks rt = tok(ref);
      double l = lcs(hyp, rt);
      if (l == 0) continue;
      double prec = l / hyp.size(), rec = l / rt.size();
      best = std::max(best, (1 + beta * beta) * prec * rec / (rec + beta * beta * prec));
    }
    total += best;
  }
  return total / pairs.size();
}

}  // namespace oracle

namespace {

std::vector<EvalPair> hand_corpus() {
  return {
      {"the cat sat on the mat", {"the cat sat on the mat"}, std::nullopt},
      {"a dog barks loudly today", {"a dog barks loudly", "the dog barks today"}, std::nullopt},
  };
}

std::vector<EvalPair> random_corpus(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {"a", "b",   "c",   "the", "dog", "cat",
                                                 "sat", "ran", "fast", "slow", "mat", "rug"};
  std::uniform_int_distribution<int> n_pairs(1, 5), len(1, 10), n_refs(1, 3),
      word(0, static_cast<int>(vocab.size()) - 1);
  std::vector<EvalPair> pairs;
  int np = n_pairs(rng);
  for (int i = 0; i < np; ++i) {
    auto sentence = [&]() {
      std::string s;
      int L = len(rng);
      for (int k = 0; k < L; ++k) {
        if (k) s += ' ';
        s += vocab[word(rng)];
      }
      return s;
    };
    EvalPair p;
    p.hypothesis = sentence();
    int nr = n_refs(rng);
    for (int r = 0; r < nr; ++r) p.references.push_back(sentence());
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace

TEST_CASE("bleu identity and disjoint extremes") {
  std::vector<EvalPair> same = {{"the cat sat on the mat", {"the cat sat on the mat"}, {}}};
  CHECK(bleu(same) == doctest::Approx(1.0));
  std::vector<EvalPair> disjoint = {{"aa bb cc dd", {"xx yy zz ww"}, {}}};
  CHECK(bleu(disjoint) == doctest::Approx(0.0));
}

TEST_CASE("bleu matches the hand-counted micro corpus") {
  // Counts done by hand on the two-pair corpus:
  //   1-grams 11/11, 2-grams 8/9, 3-grams 6/7, 4-grams 4/5; c=11, r=10 -> BP=1.
  double expected = std::pow((11.0 / 11.0) * (8.0 / 9.0) * (6.0 / 7.0) * (4.0 / 5.0), 0.25);
  CHECK(bleu(hand_corpus()) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bleu is invariant to reference order") {
  auto pairs = hand_corpus();
  std::swap(pairs[1].references[0], pairs[1].references[1]);
  CHECK(bleu(hand_corpus()) == doctest::Approx(bleu(pairs)).epsilon(1e-12));
}

TEST_CASE("bleu agrees with the oracle on randomized corpora") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 12; ++round) {
    auto pairs = random_corpus(rng);
    CHECK(bleu(pairs) == doctest::Approx(oracle::bleu(pairs, 4)).epsilon(1e-9));
  }
}

TEST_CASE("nist brevity hits 0.5 at a two-thirds length ratio") {
  // Single pair: ref "a a b" (T=3), hyp "a b" (ratio 2/3).
  // info(a)=log2(3/2), info(b)=log2(3), info(a b)=log2(count(a)/count(ab))=1.
  std::vector<EvalPair> pairs = {{"a b", {"a a b"}, {}}};
  double unigram = (std::log2(1.5) + std::log2(3.0)) / 2.0;
  double bigram = 1.0;
  double expected = (unigram + bigram) * 0.5;
  CHECK(nist(pairs) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("nist identity case equals its own information ratio") {
  std::vector<EvalPair> pairs = {{"the cat sat", {"the cat sat"}, {}}};
  CHECK(nist(pairs) == doctest::Approx(oracle::nist(pairs, 5)).epsilon(1e-9));
  CHECK(nist(pairs) > 0.0);
}

TEST_CASE("nist rejects empty input") {
  std::vector<EvalPair> none;
  CHECK_THROWS_AS(nist(none), EmptyInput);
}

TEST_CASE("nist agrees with the oracle on randomized corpora") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 12; ++round) {
    auto pairs = random_corpus(rng);
    CHECK(nist(pairs) == doctest::Approx(oracle::nist(pairs, 5)).epsilon(1e-9));
  }
}

TEST_CASE("rouge_l hand cases") {
  std::vector<EvalPair> same = {{"x y z", {"x y z"}, {}}};
  CHECK(rouge_l(same) == doctest::Approx(1.0));
  std::vector<EvalPair> disjoint = {{"a b", {"c d"}, {}}};
  CHECK(rouge_l(disjoint) == doctest::Approx(0.0));
  // LCS("a b c d", "a c b d") = 3 -> P = R = 0.75, F(beta=1) = 0.75.
  std::vector<EvalPair> crossed = {{"a b c d", {"a c b d"}, {}}};
  CHECK(rouge_l(crossed, 1.0) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("rouge_l agrees with the oracle on randomized corpora") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 12; ++round) {
    auto pairs = random_corpus(rng);
    CHECK(rouge_l(pairs, 1.2) == doctest::Approx(oracle::rouge_l(pairs, 1.2)).epsilon(1e-9));
  }
}

TEST_CASE("meteor_lite extremes and the two-chunk penalty") {
  std::vector<EvalPair> same = {{"the cat sat on the mat", {"the cat sat on the mat"}, {}}};
  CHECK(meteor_lite(same) == doctest::Approx(1.0));
  std::vector<EvalPair> none = {{"aa bb", {"cc dd"}, {}}};
  CHECK(meteor_lite(none) == doctest::Approx(0.0));

  // hyp "the cat sat" vs ref "the cat on the mat sat":
  // matches m=3 at hyp 0,1,2 -> ref 0,1,5 => chunks=2, P=1, R=0.5.
  std::vector<EvalPair> chunked = {{"the cat sat", {"the cat on the mat sat"}, {}}};
  double fmean = 10.0 * 1.0 * 0.5 / (0.5 + 9.0 * 1.0);
  double penalty = 0.5 * std::pow(2.0 / 3.0, 3.0);
  CHECK(meteor_lite(chunked) == doctest::Approx(fmean * (1.0 - penalty)).epsilon(1e-9));
}

TEST_CASE("meteor_lite stems plural and -ed forms") {
  std::vector<EvalPair> pairs = {{"cats", {"cat"}, {}}};
  CHECK(meteor_lite(pairs) == doctest::Approx(1.0));
  std::vector<EvalPair> prices = {{"moderately priced food", {"moderately priced foods"}, {}}};
  CHECK(meteor_lite(prices) > 0.9);
}

TEST_CASE("stemmer basics") {
  CHECK(stem("cats") == "cat");
  CHECK(stem("cities") == "city");
  CHECK(stem("glasses") == "glass");
  CHECK(stem("priced") == "pric");
  CHECK(stem("pricing") == "pric");
  CHECK(stem("friendly") == "friend");
  CHECK(stem("is") == "is");
}

TEST_CASE("bounded metrics score 1.0 on identical corpora and are permutation-invariant") {
  auto corpus = gen_synthetic(default_synthetic_grammar(), 40, 3);
  std::vector<EvalPair> pairs, shuffled;
  for (const auto& s : corpus.samples) pairs.push_back({s.reference, {s.reference}, {}});
  shuffled = pairs;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  CHECK(bleu(pairs) == doctest::Approx(1.0));
  CHECK(rouge_l(pairs) == doctest::Approx(1.0));
  CHECK(meteor_lite(pairs) == doctest::Approx(1.0));
  CHECK(bleu(shuffled) == doctest::Approx(bleu(pairs)).epsilon(1e-12));
  CHECK(nist(shuffled) == doctest::Approx(nist(pairs)).epsilon(1e-12));
  CHECK(rouge_l(shuffled) == doctest::Approx(rouge_l(pairs)).epsilon(1e-12));
  CHECK(meteor_lite(shuffled) == doctest::Approx(meteor_lite(pairs)).epsilon(1e-12));
}

TEST_CASE("slot_error_rate hand fixture: 2 missing + 1 over-generated out of 40") {
  auto corpus = gen_synthetic(default_synthetic_grammar(), 200, 17);
  auto gaz = build_gazetteer(corpus, SynonymLexicon{}, default_alignment_rules());

  std::vector<std::pair<std::string, MeaningRepresentation>> outputs;
  // Eight outputs with five slots each; all realized.
  for (int i = 0; i < 8; ++i) {
    auto mr = parse_mr(
        "name[The Phoenix], eatType[pub], food[Italian], area[riverside], near[Ranch]",
        Dialect::e2e);
    std::string utt = "The Phoenix is a pub in the riverside area near Ranch serving Italian "
                      "food.";
    outputs.emplace_back(utt, mr);
  }
  // Output 0 and 1 lose a slot mention each (area / food).
  outputs[0].first = "The Phoenix is a pub near Ranch serving Italian food.";
  outputs[1].first = "The Phoenix is a pub in the riverside area near Ranch.";
  // Output 2 over-generates a price mention absent from its MR.
  outputs[2].first =
      "The Phoenix is a cheap pub in the riverside area near Ranch serving Italian food.";

  // Sanity-check the constructed counts before freezing the expected rates.
  std::size_t total = 0, missed = 0, over = 0;
  for (const auto& [utt, mr] : outputs) {
    auto rep = align_utterance(utt, mr, gaz);
    total += rep.total_slots;
    missed += rep.n_u();
    over += rep.n_o();
  }
  REQUIRE(total == 40);
  REQUIRE(missed == 2);
  REQUIRE(over == 1);

  CHECK(slot_error_rate(outputs, gaz, ErrMode::human_eval) == doctest::Approx(0.05));
  CHECK(slot_error_rate(outputs, gaz, ErrMode::rnnlg) == doctest::Approx(0.075));
}

TEST_CASE("slot_error_rate is a weighted average under concatenation") {
  auto corpus = gen_synthetic(default_synthetic_grammar(), 100, 19);
  auto gaz = build_gazetteer(corpus, SynonymLexicon{}, default_alignment_rules());
  std::vector<std::pair<std::string, MeaningRepresentation>> a, b, both;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    auto& vec = i % 2 ? a : b;
    // Cross-pair half the utterances to create nonzero error counts.
    const auto& utt = corpus.samples[i % 3 ? i : corpus.samples.size() - 1 - i].reference;
    vec.emplace_back(utt, corpus.samples[i].mr);
    both.emplace_back(utt, corpus.samples[i].mr);
  }
  auto count_slots = [](const std::vector<std::pair<std::string, MeaningRepresentation>>& v) {
    double n = 0;
    for (const auto& [u, m] : v) n += static_cast<double>(m.slots.size());
    return n;
  };
  double na = count_slots(a), nb = count_slots(b);
  double expected = (slot_error_rate(a, gaz) * na + slot_error_rate(b, gaz) * nb) / (na + nb);
  CHECK(slot_error_rate(both, gaz) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("load_eval_pairs parses the grouped reference format") {
  auto dir = std::filesystem::temp_directory_path();
  auto hyp = dir / "mrgen_hyp.txt";
  auto ref = dir / "mrgen_ref.txt";
  {
    std::ofstream h(hyp);
    h << "a b c\nx y\n";
    std::ofstream r(ref);
    r << "a b c\na b\n\nx y\n";
  }
  auto pairs = load_eval_pairs(hyp.string(), ref.string(), std::nullopt);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].references.size() == 2);
  CHECK(pairs[1].references.size() == 1);
  CHECK(bleu(pairs) == doctest::Approx(1.0));
  std::filesystem::remove(hyp);
  std::filesystem::remove(ref);
}
