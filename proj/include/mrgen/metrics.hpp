#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrgen/aligner.hpp"
#include "mrgen/mr.hpp"

namespace mrgen {

struct EvalPair {
  std::string hypothesis;
  std::vector<std::string> references;  // non-empty
  std::optional<MeaningRepresentation> mr;  // required for error rates
};

// Corpus BLEU: modified n-gram precision (n <= max_n), geometric mean,
// closest-reference brevity penalty. Unsmoothed by default (any zero
// precision gives 0); smoothing adds one to numerator and denominator of
// higher-order precisions.
double bleu(const std::vector<EvalPair>& pairs, int max_n = 4, bool smooth = false);

// Information-weighted n-gram co-occurrence with the NIST brevity factor;
// n-gram information is estimated from the reference corpus.
double nist(const std::vector<EvalPair>& pairs, int max_n = 5);

// LCS F-measure, best reference per pair, averaged over the corpus.
double rouge_l(const std::vector<EvalPair>& pairs, double beta = 1.2);

// Exact + stem matching only (no synonym/paraphrase stages); fragmentation
// penalty 0.5*(chunks/matches)^3, zero for a single contiguous match.
// Averaged over the corpus.
double meteor_lite(const std::vector<EvalPair>& pairs);

// Small rule-based suffix stripper used by meteor_lite.
std::string stem(const std::string& token);

enum class ErrMode { human_eval, rnnlg };

// Unaligned slots (plus over-generated ones in rnnlg mode) over total slots.
double slot_error_rate(const std::vector<std::pair<std::string, MeaningRepresentation>>& outputs,
                       const Gazetteer& gaz, ErrMode mode = ErrMode::human_eval);

struct MetricReport {
  double bleu = 0.0;
  double nist = 0.0;
  double meteor_lite = 0.0;
  double rouge_l = 0.0;
  std::optional<double> err;
  int bleu_max_n = 4;
  bool bleu_smoothed = false;
  int nist_max_n = 5;
  double rouge_beta = 1.2;
  ErrMode err_mode = ErrMode::human_eval;
};

MetricReport evaluate_pairs(const std::vector<EvalPair>& pairs, const Gazetteer* gaz = nullptr,
                            ErrMode err_mode = ErrMode::human_eval);

// hyp file: one hypothesis per line. ref file: references grouped per MR,
// groups separated by blank lines (one group per hypothesis). mr file
// (optional): one MR per line.
std::vector<EvalPair> load_eval_pairs(const std::string& hyp_path, const std::string& ref_path,
                                      const std::optional<std::string>& mr_path,
                                      Dialect dialect = Dialect::e2e);

}  // namespace mrgen
