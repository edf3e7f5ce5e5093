#pragma once

#include <utility>
#include <vector>

#include "mrgen/nn/model.hpp"

namespace mrgen::nn {

// One training example: encoder input ids and target ids (EOS-terminated).
struct TokenPair {
  std::vector<int> src;
  std::vector<int> tgt;
};

struct TrainingLog {
  struct Entry {
    int epoch = 0;
    double train_loss = 0.0;  // mean per-token loss over the epoch
    double val_loss = 0.0;    // NaN when no validation set given
  };
  std::vector<Entry> entries;
};

// Mini-batch gradient descent (Adam by default) on the mean per-token
// cross-entropy; single-threaded and deterministic given hyper.seed.
struct TrainResult {
  ModelParams params;
  TrainingLog log;
};

TrainResult train_model(const std::vector<TokenPair>& train, const std::vector<TokenPair>& val,
                        const Hyperparams& hyper);

double mean_loss(const ModelParams& params, const std::vector<TokenPair>& pairs);

}  // namespace mrgen::nn
