#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mrgen/aligner.hpp"
#include "mrgen/delex.hpp"
#include "mrgen/mr.hpp"
#include "mrgen/nn/checkpoint.hpp"

namespace mrgen {

// s_align = N / ((N_u + 1) * (N_o + 1)); throws DomainError for N < 1.
double slot_alignment_score(int total_slots, int unaligned, int overgenerated);

struct Candidate {
  std::vector<std::string> tokens;  // surface tokens, reserved ids stripped
  double log_prob = 0.0;
  double normalized_score = 0.0;
  std::string source_model;
  int beam_rank = 0;

  std::string text() const;
};

struct CandidatePool {
  std::vector<Candidate> candidates;
};

struct SubmodelSpec {
  std::string checkpoint_path;
  nn::EncoderKind encoder = nn::EncoderKind::bilstm;
  int epochs_trained = 0;
  double alpha = 0.6;  // length penalty used when pooling from this model
  std::string name;
};

struct EnsembleSpec {
  std::vector<SubmodelSpec> submodels;
  int pool_k = 10;
};

EnsembleSpec load_ensemble_spec(const std::string& path);
void save_ensemble_spec(const EnsembleSpec& spec, const std::string& path);

struct RankedCandidate {
  Candidate candidate;
  std::string relexed;
  double s_align = 0.0;
  double final_score = 0.0;
  AlignmentReport report;
};

struct RerankResult {
  std::vector<RankedCandidate> ranked;  // final_score non-increasing
  const RankedCandidate& winner() const { return ranked.front(); }
};

// final score = exp(length-normalized log-prob) * s_align; ties break by
// submodel order, then beam rank, which the pool order already encodes.
RerankResult rerank(const CandidatePool& pool, const MeaningRepresentation& mr,
                    const Gazetteer& gaz, const DelexPolicy& policy);

// Loaded submodels plus the shared delex policy; decodes with each model's
// configured length penalty and pools the top-k of each beam.
class Ensemble {
 public:
  struct Submodel {
    nn::Checkpoint checkpoint;
    double alpha;
    std::string name;
  };

  Ensemble(std::vector<Submodel> submodels, DelexPolicy policy, int pool_k);
  static Ensemble load(const EnsembleSpec& spec, const DelexPolicy& policy);

  CandidatePool pool_candidates(const MeaningRepresentation& mr) const;

  struct GenerateResult {
    std::string utterance;  // relexicalized, no placeholder survives
    RerankResult rerank;
  };
  GenerateResult generate(const std::string& raw_mr_text, Dialect dialect,
                          const Gazetteer& gaz) const;
  GenerateResult generate(const MeaningRepresentation& mr, const Gazetteer& gaz) const;

  int pool_k() const { return pool_k_; }
  const std::vector<Submodel>& submodels() const { return submodels_; }

 private:
  std::vector<Submodel> submodels_;
  DelexPolicy policy_;
  int pool_k_;
};

}  // namespace mrgen
