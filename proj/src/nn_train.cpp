#include "mrgen/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace mrgen::nn {

namespace {

// Adam state mirrors the parameter tensors; plain SGD ignores it.
struct Optimizer {
  OptimizerKind kind;
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long step = 0;
  ModelParams m, v;

  explicit Optimizer(const Hyperparams& hyper)
      : kind(hyper.optimizer),
        lr(hyper.learning_rate),
        m(ModelParams::zeros(hyper)),
        v(ModelParams::zeros(hyper)) {}

  void apply(ModelParams& params, ModelParams& grads) {
    ++step;
    auto collect = [](ModelParams& p, std::vector<double*>& ptrs, std::vector<long long>& sizes) {
      p.for_each_tensor([&](const std::string&, auto& t) {
        ptrs.push_back(t.data());
        sizes.push_back(t.size());
      });
    };
    std::vector<double*> tp, gp, mp, vp;
    std::vector<long long> sizes, ignored;
    collect(params, tp, sizes);
    collect(grads, gp, ignored);
    collect(m, mp, ignored);
    collect(v, vp, ignored);

    if (kind == OptimizerKind::sgd) {
      for (std::size_t k = 0; k < tp.size(); ++k)
        for (long long i = 0; i < sizes[k]; ++i) tp[k][i] -= lr * gp[k][i];
      return;
    }
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t k = 0; k < tp.size(); ++k) {
      for (long long i = 0; i < sizes[k]; ++i) {
        double g = gp[k][i];
        mp[k][i] = beta1 * mp[k][i] + (1.0 - beta1) * g;
        vp[k][i] = beta2 * vp[k][i] + (1.0 - beta2) * g * g;
        tp[k][i] -= lr * (mp[k][i] / bc1) / (std::sqrt(vp[k][i] / bc2) + eps);
      }
    }
  }
};

}  // namespace

double mean_loss(const ModelParams& params, const std::vector<TokenPair>& pairs) {
  if (pairs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  long long tokens = 0;
  for (const auto& p : pairs) {
    if (p.tgt.empty()) continue;
    total += sequence_loss(params, p.src, p.tgt) * static_cast<double>(p.tgt.size());
    tokens += static_cast<long long>(p.tgt.size());
  }
  return tokens == 0 ? 0.0 : total / static_cast<double>(tokens);
}

TrainResult train_model(const std::vector<TokenPair>& train, const std::vector<TokenPair>& val,
                        const Hyperparams& hyper) {
  hyper.validate();
  if (train.empty()) throw ConfigError("train_model: empty training set");

  TrainResult result{ModelParams::init(hyper, hyper.seed), {}};
  ModelParams grads = ModelParams::zeros(hyper);
  Optimizer opt(hyper);
  std::mt19937_64 shuffle_rng(hyper.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    long long epoch_tokens = 0;

    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t batch_end = std::min(order.size(), i + static_cast<std::size_t>(hyper.batch_size));
      grads.set_zero();
      int in_batch = 0;
      for (std::size_t k = i; k < batch_end; ++k) {
        const auto& pair = train[order[k]];
        if (pair.tgt.empty()) continue;
        double loss = sequence_gradients(result.params, pair.src, pair.tgt, grads);
        epoch_loss += loss * static_cast<double>(pair.tgt.size());
        epoch_tokens += static_cast<long long>(pair.tgt.size());
        ++in_batch;
      }
      if (in_batch > 0) {
        double scale = 1.0 / static_cast<double>(in_batch);
        grads.for_each_tensor([&](const std::string&, auto& t) { t *= scale; });
        opt.apply(result.params, grads);
      }
      i = batch_end;
    }

    TrainingLog::Entry entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_tokens == 0 ? 0.0 : epoch_loss / static_cast<double>(epoch_tokens);
    entry.val_loss = mean_loss(result.params, val);
    result.log.entries.push_back(entry);
  }
  return result;
}

}  // namespace mrgen::nn
