#pragma once

#include <optional>

#include "mrgen/dataset.hpp"
#include "mrgen/delex.hpp"
#include "mrgen/nn/checkpoint.hpp"
#include "mrgen/nn/train.hpp"

namespace mrgen {

// Delexicalized, linearized training pairs plus the vocabularies built from
// them. When `fixed` vocabularies are given (validation/test views), unknown
// tokens map to UNK instead of growing the tables.
struct PreparedData {
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  std::vector<nn::TokenPair> pairs;
};

PreparedData prepare_pairs(const Dataset& dataset, const DelexPolicy& policy);
std::vector<nn::TokenPair> prepare_pairs_fixed(const Dataset& dataset, const DelexPolicy& policy,
                                               const Vocabulary& src_vocab,
                                               const Vocabulary& tgt_vocab);

// [OP] train: delexicalizes, linearizes, builds vocabularies, and runs the
// optimizer. Vocab sizes in `hyper` are filled in from the data.
struct TrainedSubmodel {
  nn::Checkpoint checkpoint;
  nn::TrainingLog log;
};

TrainedSubmodel train_submodel(const Dataset& train, const Dataset* validation,
                               const DelexPolicy& policy, nn::Hyperparams hyper);

}  // namespace mrgen
