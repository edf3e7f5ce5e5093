#include "mrgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_map>

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

namespace {

using Tokens = std::vector<std::string>;

Tokens toks(const std::string& s) { return tokenize(s).tokens; }

std::unordered_map<std::string, int> ngram_counts(const Tokens& t, int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(t.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string g = t[i];
    for (int k = 1; k < n; ++k) g += '\x1f' + t[i + k];
    ++counts[g];
  }
  return counts;
}

}  // namespace

double bleu(const std::vector<EvalPair>& pairs, int max_n, bool smooth) {
  if (pairs.empty()) throw EmptyInput("bleu: no pairs");
  std::vector<long long> numer(max_n + 1, 0), denom(max_n + 1, 0);
  long long hyp_len_total = 0, ref_len_total = 0;

  for (const auto& pair : pairs) {
    Tokens hyp = toks(pair.hypothesis);
    std::vector<Tokens> refs;
    refs.reserve(pair.references.size());
    for (const auto& r : pair.references) refs.push_back(toks(r));
    if (refs.empty()) throw EmptyInput("bleu: pair without references");

    hyp_len_total += static_cast<long long>(hyp.size());
    // Closest reference length; ties prefer the shorter.
    long long best_ref = static_cast<long long>(refs[0].size());
    for (const auto& r : refs) {
      long long len = static_cast<long long>(r.size());
      long long hl = static_cast<long long>(hyp.size());
      if (std::llabs(len - hl) < std::llabs(best_ref - hl) ||
          (std::llabs(len - hl) == std::llabs(best_ref - hl) && len < best_ref))
        best_ref = len;
    }
    ref_len_total += best_ref;

    for (int n = 1; n <= max_n; ++n) {
      auto hyp_counts = ngram_counts(hyp, n);
      std::unordered_map<std::string, int> max_ref;
      for (const auto& r : refs)
        for (const auto& [g, c] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
      for (const auto& [g, c] : hyp_counts) {
        auto it = max_ref.find(g);
        numer[n] += std::min(c, it == max_ref.end() ? 0 : it->second);
      }
      denom[n] += std::max<long long>(0, static_cast<long long>(hyp.size()) - n + 1);
    }
  }

  double log_prec_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    double num = static_cast<double>(numer[n]);
    double den = static_cast<double>(denom[n]);
    if (smooth && n > 1) {
      num += 1.0;
      den += 1.0;
    }
    if (num <= 0.0 || den <= 0.0) return 0.0;
    log_prec_sum += std::log(num / den);
  }
  double bp = 1.0;
  if (hyp_len_total < ref_len_total && hyp_len_total > 0)
    bp = std::exp(1.0 - static_cast<double>(ref_len_total) / static_cast<double>(hyp_len_total));
  if (hyp_len_total == 0) return 0.0;
  return bp * std::exp(log_prec_sum / max_n);
}

double nist(const std::vector<EvalPair>& pairs, int max_n) {
  if (pairs.empty()) throw EmptyInput("nist: no pairs");

  // Reference-corpus n-gram statistics for the information weights.
  std::unordered_map<std::string, long long> ref_counts;  // keyed by n-gram, all orders
  long long total_ref_words = 0;
  for (const auto& pair : pairs) {
    for (const auto& r : pair.references) {
      Tokens rt = toks(r);
      total_ref_words += static_cast<long long>(rt.size());
      for (int n = 1; n <= max_n; ++n)
        for (const auto& [g, c] : ngram_counts(rt, n)) ref_counts[g] += c;
    }
  }
  if (total_ref_words == 0) throw EmptyInput("nist: empty references");

  auto info = [&](const std::string& g) -> double {
    auto it = ref_counts.find(g);
    if (it == ref_counts.end() || it->second == 0) return 0.0;
    auto cut = g.rfind('\x1f');
    double denom_count = static_cast<double>(it->second);
    double numer_count;
    if (cut == std::string::npos) {
      numer_count = static_cast<double>(total_ref_words);
    } else {
      auto pit = ref_counts.find(g.substr(0, cut));
      numer_count = pit == ref_counts.end() ? 0.0 : static_cast<double>(pit->second);
    }
    if (numer_count <= 0.0) return 0.0;
    return std::log2(numer_count / denom_count);
  };

  std::vector<double> numer(max_n + 1, 0.0);
  std::vector<long long> denom(max_n + 1, 0);
  double hyp_len_total = 0.0, ref_len_avg_total = 0.0;

  for (const auto& pair : pairs) {
    Tokens hyp = toks(pair.hypothesis);
    std::vector<Tokens> refs;
    for (const auto& r : pair.references) refs.push_back(toks(r));
    hyp_len_total += static_cast<double>(hyp.size());
    double avg = 0.0;
    for (const auto& r : refs) avg += static_cast<double>(r.size());
    ref_len_avg_total += avg / static_cast<double>(refs.size());

    for (int n = 1; n <= max_n; ++n) {
      auto hyp_counts = ngram_counts(hyp, n);
      std::unordered_map<std::string, int> max_ref;
      for (const auto& r : refs)
        for (const auto& [g, c] : ngram_counts(r, n)) max_ref[g] = std::max(max_ref[g], c);
      for (const auto& [g, c] : hyp_counts) {
        auto it = max_ref.find(g);
        int cooc = std::min(c, it == max_ref.end() ? 0 : it->second);
        if (cooc > 0) numer[n] += static_cast<double>(cooc) * info(g);
      }
      denom[n] += std::max<long long>(0, static_cast<long long>(hyp.size()) - n + 1);
    }
  }

  double score = 0.0;
  for (int n = 1; n <= max_n; ++n)
    if (denom[n] > 0) score += numer[n] / static_cast<double>(denom[n]);

  // Brevity factor: 0.5 when the system output is 2/3 of the reference length.
  static const double beta = std::log(0.5) / (std::log(1.5) * std::log(1.5));
  double ratio = ref_len_avg_total > 0.0 ? hyp_len_total / ref_len_avg_total : 0.0;
  double bp = ratio >= 1.0 ? 1.0 : std::exp(beta * std::log(ratio) * std::log(ratio));
  if (ratio <= 0.0) bp = 0.0;
  return score * bp;
}

namespace {

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

double rouge_l(const std::vector<EvalPair>& pairs, double beta) {
  if (pairs.empty()) throw EmptyInput("rouge_l: no pairs");
  double total = 0.0;
  for (const auto& pair : pairs) {
    Tokens hyp = toks(pair.hypothesis);
    double best = 0.0;
    for (const auto& r : pair.references) {
      Tokens ref = toks(r);
      std::size_t lcs = lcs_length(hyp, ref);
      if (lcs == 0 || hyp.empty() || ref.empty()) continue;
      double p = static_cast<double>(lcs) / static_cast<double>(hyp.size());
      double rr = static_cast<double>(lcs) / static_cast<double>(ref.size());
      double b2 = beta * beta;
      double f = (1.0 + b2) * rr * p / (rr + b2 * p);
      best = std::max(best, f);
    }
    total += best;
  }
  return total / static_cast<double>(pairs.size());
}

std::string stem(const std::string& token) {
  std::string t = token;
  auto ends_with = [&](const char* suf) {
    std::size_t n = std::strlen(suf);
    return t.size() >= n && t.compare(t.size() - n, n, suf) == 0;
  };
  auto chop = [&](std::size_t n) { t.resize(t.size() - n); };

  if (ends_with("'s")) chop(2);
  if (t.size() > 4 && ends_with("ies")) {
    chop(3);
    t += 'y';
  } else if (t.size() > 4 && ends_with("sses")) {
    chop(2);
  }
  if (t.size() > 3 && t.back() == 's' && !ends_with("ss") && !ends_with("us") && !ends_with("is"))
    chop(1);
  if (t.size() > 5 && ends_with("ing"))
    chop(3);
  else if (t.size() > 4 && ends_with("ed"))
    chop(2);
  else if (t.size() > 4 && ends_with("ly"))
    chop(2);
  return t;
}

namespace {

struct MeteorMatch {
  int hyp_pos;
  int ref_pos;
};

double meteor_segment(const Tokens& hyp, const Tokens& ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  std::vector<int> hyp_match(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);

  auto run_stage = [&](auto&& key) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (hyp_match[i] >= 0) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (ref_used[j]) continue;
        if (key(hyp[i]) == key(ref[j])) {
          hyp_match[i] = static_cast<int>(j);
          ref_used[j] = true;
          break;
        }
      }
    }
  };
  run_stage([](const std::string& w) { return w; });
  run_stage([](const std::string& w) { return stem(w); });

  std::vector<MeteorMatch> aligned;
  for (std::size_t i = 0; i < hyp.size(); ++i)
    if (hyp_match[i] >= 0) aligned.push_back({static_cast<int>(i), hyp_match[i]});
  int m = static_cast<int>(aligned.size());
  if (m == 0) return 0.0;

  int chunks = 1;
  for (std::size_t k = 1; k < aligned.size(); ++k) {
    if (aligned[k].hyp_pos != aligned[k - 1].hyp_pos + 1 ||
        aligned[k].ref_pos != aligned[k - 1].ref_pos + 1)
      ++chunks;
  }
  double p = static_cast<double>(m) / static_cast<double>(hyp.size());
  double r = static_cast<double>(m) / static_cast<double>(ref.size());
  double fmean = 10.0 * p * r / (r + 9.0 * p);
  double penalty = chunks <= 1 ? 0.0
                               : 0.5 * std::pow(static_cast<double>(chunks) / m, 3.0);
  return fmean * (1.0 - penalty);
}

}  // namespace

double meteor_lite(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw EmptyInput("meteor_lite: no pairs");
  double total = 0.0;
  for (const auto& pair : pairs) {
    Tokens hyp = toks(pair.hypothesis);
    double best = 0.0;
    for (const auto& r : pair.references) best = std::max(best, meteor_segment(hyp, toks(r)));
    total += best;
  }
  return total / static_cast<double>(pairs.size());
}

double slot_error_rate(const std::vector<std::pair<std::string, MeaningRepresentation>>& outputs,
                       const Gazetteer& gaz, ErrMode mode) {
  std::size_t missed = 0, over = 0, total = 0;
  for (const auto& [utterance, mr] : outputs) {
    auto report = align_utterance(utterance, mr, gaz);
    missed += report.n_u();
    over += report.n_o();
    total += report.total_slots;
  }
  if (total == 0) return 0.0;
  double bad = static_cast<double>(missed);
  if (mode == ErrMode::rnnlg) bad += static_cast<double>(over);
  return bad / static_cast<double>(total);
}

MetricReport evaluate_pairs(const std::vector<EvalPair>& pairs, const Gazetteer* gaz,
                            ErrMode err_mode) {
  MetricReport report;
  report.bleu = bleu(pairs);
  report.nist = nist(pairs);
  report.meteor_lite = meteor_lite(pairs);
  report.rouge_l = rouge_l(pairs);
  report.err_mode = err_mode;
  if (gaz) {
    std::vector<std::pair<std::string, MeaningRepresentation>> outputs;
    bool all_have_mr = true;
    for (const auto& p : pairs) {
      if (!p.mr) {
        all_have_mr = false;
        break;
      }
      outputs.emplace_back(p.hypothesis, *p.mr);
    }
    if (all_have_mr && !outputs.empty())
      report.err = slot_error_rate(outputs, *gaz, err_mode);
  }
  return report;
}

std::vector<EvalPair> load_eval_pairs(const std::string& hyp_path, const std::string& ref_path,
                                      const std::optional<std::string>& mr_path,
                                      Dialect dialect) {
  std::ifstream hyp_in(hyp_path);
  if (!hyp_in) throw IoError("cannot open " + hyp_path);
  std::vector<std::string> hyps;
  std::string line;
  while (std::getline(hyp_in, line)) hyps.push_back(normalize_ws(line));
  while (!hyps.empty() && hyps.back().empty()) hyps.pop_back();
  if (hyps.empty()) throw EmptyInput("no hypotheses in " + hyp_path);

  std::ifstream ref_in(ref_path);
  if (!ref_in) throw IoError("cannot open " + ref_path);
  std::vector<std::vector<std::string>> groups(1);
  while (std::getline(ref_in, line)) {
    std::string norm = normalize_ws(line);
    if (norm.empty()) {
      if (!groups.back().empty()) groups.emplace_back();
    } else {
      groups.back().push_back(norm);
    }
  }
  if (groups.back().empty()) groups.pop_back();
  if (groups.size() != hyps.size())
    throw ParseError("reference group count (" + std::to_string(groups.size()) +
                     ") does not match hypothesis count (" + std::to_string(hyps.size()) + ")");

  std::vector<std::optional<MeaningRepresentation>> mrs(hyps.size());
  if (mr_path) {
    std::ifstream mr_in(*mr_path);
    if (!mr_in) throw IoError("cannot open " + *mr_path);
    std::size_t i = 0;
    while (std::getline(mr_in, line)) {
      std::string norm = normalize_ws(line);
      if (norm.empty()) continue;
      if (i >= hyps.size()) throw ParseError("more MRs than hypotheses in " + *mr_path);
      mrs[i++] = parse_mr(norm, dialect);
    }
    if (i != hyps.size())
      throw ParseError("MR count does not match hypothesis count in " + *mr_path);
  }

  std::vector<EvalPair> pairs;
  for (std::size_t i = 0; i < hyps.size(); ++i)
    pairs.push_back({hyps[i], groups[i], mrs[i]});
  return pairs;
}

}  // namespace mrgen
