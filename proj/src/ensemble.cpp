#include "mrgen/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mrgen/nn/beam.hpp"
#include "mrgen/text.hpp"
#include "mrgen/vocab.hpp"

namespace mrgen {

double slot_alignment_score(int total_slots, int unaligned, int overgenerated) {
  if (total_slots < 1) throw DomainError("s_align requires at least one slot");
  if (unaligned < 0 || overgenerated < 0 || unaligned > total_slots)
    throw DomainError("inconsistent alignment counts");
  return static_cast<double>(total_slots) /
         (static_cast<double>(unaligned + 1) * static_cast<double>(overgenerated + 1));
}

std::string Candidate::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

EnsembleSpec load_ensemble_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ensemble spec " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  EnsembleSpec spec;
  spec.pool_k = doc.value("pool_k", 10);
  if (spec.pool_k < 1) throw ConfigError(path + ": pool_k must be >= 1");
  for (const auto& node : doc.at("submodels")) {
    SubmodelSpec sm;
    sm.checkpoint_path = node.at("checkpoint").get<std::string>();
    sm.encoder = nn::encoder_kind_from_string(node.value("encoder", std::string("bilstm")));
    sm.epochs_trained = node.value("epochs", 0);
    sm.alpha = node.value("alpha", 0.6);
    sm.name = node.value("name", sm.checkpoint_path);
    spec.submodels.push_back(std::move(sm));
  }
  if (spec.submodels.empty()) throw ConfigError(path + ": at least one submodel required");
  return spec;
}

void save_ensemble_spec(const EnsembleSpec& spec, const std::string& path) {
  nlohmann::json doc;
  doc["pool_k"] = spec.pool_k;
  doc["submodels"] = nlohmann::json::array();
  for (const auto& sm : spec.submodels) {
    doc["submodels"].push_back({{"checkpoint", sm.checkpoint_path},
                                {"encoder", nn::to_string(sm.encoder)},
                                {"epochs", sm.epochs_trained},
                                {"alpha", sm.alpha},
                                {"name", sm.name}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write ensemble spec " + path);
  out << doc.dump(2) << "\n";
}

namespace {

// Beam-search scorer over one loaded submodel and one encoded MR.
struct ModelScorer {
  const nn::ModelParams& params;
  nn::Mat H;

  nn::DecoderState initial_state() const { return nn::initial_decoder_state(params.hyper); }
  void step(const nn::DecoderState& state, int prev_token, nn::Vec& log_probs,
            nn::DecoderState& next) const {
    auto res = nn::decode_step(params, prev_token, state, H);
    log_probs = std::move(res.log_probs);
    next = std::move(res.state);
  }
};

}  // namespace

Ensemble::Ensemble(std::vector<Submodel> submodels, DelexPolicy policy, int pool_k)
    : submodels_(std::move(submodels)), policy_(std::move(policy)), pool_k_(pool_k) {
  if (submodels_.empty()) throw ConfigError("ensemble needs at least one submodel");
  if (pool_k_ < 1) throw ConfigError("pool_k must be >= 1");
}

Ensemble Ensemble::load(const EnsembleSpec& spec, const DelexPolicy& policy) {
  std::vector<Submodel> loaded;
  for (const auto& sm : spec.submodels) {
    Submodel m{nn::load_checkpoint(sm.checkpoint_path), sm.alpha, sm.name};
    if (m.checkpoint.params.hyper.encoder != sm.encoder)
      throw CheckpointError("checkpoint " + sm.checkpoint_path +
                            " does not match the declared encoder kind");
    loaded.push_back(std::move(m));
  }
  return Ensemble(std::move(loaded), policy, spec.pool_k);
}

CandidatePool Ensemble::pool_candidates(const MeaningRepresentation& mr) const {
  // Delexicalize the MR exactly as in training; the reference is unused here.
  Sample probe{mr, "-", "query"};
  MeaningRepresentation delex_mr = delexicalize(probe, policy_).delex_mr;
  auto src_tokens = linearize_mr(delex_mr);

  CandidatePool pool;
  for (const auto& sm : submodels_) {
    const auto& params = sm.checkpoint.params;
    ModelScorer scorer{params, nn::encode(params, to_ids(src_tokens, sm.checkpoint.src_vocab)).H};
    auto hyps = nn::beam_search(scorer, Vocabulary::kBos, Vocabulary::kEos, pool_k_, sm.alpha,
                                params.hyper.max_decode_len);
    int rank = 0;
    for (const auto& h : hyps) {
      Candidate c;
      for (int id : h.tokens) {
        if (id == Vocabulary::kEos || id == Vocabulary::kBos) continue;
        c.tokens.push_back(sm.checkpoint.tgt_vocab.token(id));
      }
      c.log_prob = h.log_prob;
      c.normalized_score = h.normalized_score;
      c.source_model = sm.name;
      c.beam_rank = rank++;
      pool.candidates.push_back(std::move(c));
    }
  }
  return pool;
}

RerankResult rerank(const CandidatePool& pool, const MeaningRepresentation& mr,
                    const Gazetteer& gaz, const DelexPolicy& policy) {
  if (pool.candidates.empty()) throw EmptyPool("rerank: empty candidate pool");
  RerankResult result;
  for (const auto& cand : pool.candidates) {
    RankedCandidate rc;
    rc.candidate = cand;
    rc.relexed = relexicalize(cand.text(), mr, policy).text;
    rc.report = align_utterance(rc.relexed, mr, gaz);
    rc.s_align = mr.slots.empty()
                     ? 1.0  // slotless DAs (goodbye) rank purely by model score
                     : slot_alignment_score(static_cast<int>(rc.report.total_slots),
                                            static_cast<int>(rc.report.n_u()),
                                            static_cast<int>(rc.report.n_o()));
    rc.final_score = std::exp(cand.normalized_score) * rc.s_align;
    result.ranked.push_back(std::move(rc));
  }
  // Stable sort keeps (submodel order, beam rank) on ties.
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.final_score > b.final_score;
                   });
  return result;
}

Ensemble::GenerateResult Ensemble::generate(const std::string& raw_mr_text, Dialect dialect,
                                            const Gazetteer& gaz) const {
  return generate(parse_mr(raw_mr_text, dialect), gaz);
}

Ensemble::GenerateResult Ensemble::generate(const MeaningRepresentation& mr,
                                            const Gazetteer& gaz) const {
  CandidatePool pool = pool_candidates(mr);
  RerankResult ranked = rerank(pool, mr, gaz, policy_);

  // Orphan placeholders were already penalized via N_o; drop them from the
  // final surface so no placeholder token survives. Casing of relexicalized
  // values stays untouched.
  std::string utterance;
  std::size_t i = 0;
  const std::string& relexed = ranked.winner().relexed;
  while (i < relexed.size()) {
    std::size_t sp = relexed.find(' ', i);
    if (sp == std::string::npos) sp = relexed.size();
    std::string word = relexed.substr(i, sp - i);
    i = sp + 1;
    if (word.empty() || parse_placeholder(word)) continue;
    if (word == "<unk>" || word == "<bos>" || word == "<eos>") continue;
    if (!utterance.empty()) utterance += ' ';
    utterance += word;
  }
  return {utterance, std::move(ranked)};
}

}  // namespace mrgen
