#include "mrgen/generation.hpp"

#include "mrgen/text.hpp"

namespace mrgen {

namespace {

template <typename SrcLookup, typename TgtLookup>
nn::TokenPair make_pair_ids(const Sample& sample, const DelexPolicy& policy, SrcLookup&& src_id,
                            TgtLookup&& tgt_id) {
  DelexSample dx = delexicalize(sample, policy);
  auto src_tokens = linearize_mr(dx.delex_mr);
  auto tgt_tokens = tokenize(dx.delex_utterance).tokens;

  nn::TokenPair pair;
  pair.src.reserve(src_tokens.size());
  pair.tgt.reserve(tgt_tokens.size() + 1);
  for (const auto& t : src_tokens) pair.src.push_back(src_id(t));
  for (const auto& t : tgt_tokens) pair.tgt.push_back(tgt_id(t));
  pair.tgt.push_back(Vocabulary::kEos);
  return pair;
}

}  // namespace

PreparedData prepare_pairs(const Dataset& dataset, const DelexPolicy& policy) {
  PreparedData out;
  for (const auto& sample : dataset.samples)
    out.pairs.push_back(make_pair_ids(
        sample, policy, [&](const std::string& t) { return out.src_vocab.add(t); },
        [&](const std::string& t) { return out.tgt_vocab.add(t); }));
  return out;
}

std::vector<nn::TokenPair> prepare_pairs_fixed(const Dataset& dataset, const DelexPolicy& policy,
                                               const Vocabulary& src_vocab,
                                               const Vocabulary& tgt_vocab) {
  std::vector<nn::TokenPair> pairs;
  for (const auto& sample : dataset.samples)
    pairs.push_back(make_pair_ids(
        sample, policy, [&](const std::string& t) { return src_vocab.id(t); },
        [&](const std::string& t) { return tgt_vocab.id(t); }));
  return pairs;
}

TrainedSubmodel train_submodel(const Dataset& train, const Dataset* validation,
                               const DelexPolicy& policy, nn::Hyperparams hyper) {
  PreparedData data = prepare_pairs(train, policy);
  hyper.src_vocab = data.src_vocab.size();
  hyper.tgt_vocab = data.tgt_vocab.size();

  std::vector<nn::TokenPair> val_pairs;
  if (validation)
    val_pairs = prepare_pairs_fixed(*validation, policy, data.src_vocab, data.tgt_vocab);

  nn::TrainResult res = nn::train_model(data.pairs, val_pairs, hyper);
  return {{std::move(res.params), std::move(data.src_vocab), std::move(data.tgt_vocab)},
          std::move(res.log)};
}

}  // namespace mrgen
