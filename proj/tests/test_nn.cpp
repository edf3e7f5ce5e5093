#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "doctest.h"
#include "mrgen/error.hpp"
#include "mrgen/nn/beam.hpp"
#include "mrgen/nn/checkpoint.hpp"
#include "mrgen/nn/model.hpp"
#include "mrgen/nn/train.hpp"

using namespace mrgen;
using namespace mrgen::nn;

namespace {

Hyperparams toy_hyper(EncoderKind kind, int dec_layers = 1) {
  Hyperparams h;
  h.src_vocab = 12;
  h.tgt_vocab = 10;
  h.embed_dim = 8;
  h.encoder = kind;
  h.enc_hidden = 8;
  h.dec_layers = dec_layers;
  h.dec_hidden = 8;
  h.att_dim = 8;
  h.max_decode_len = 12;
  return h;
}

std::vector<int> ids(std::initializer_list<int> v) { return std::vector<int>(v); }

}  // namespace

TEST_CASE("encode preserves the input length for both encoder kinds") {
  for (auto kind : {EncoderKind::bilstm, EncoderKind::cnn_pooling}) {
    auto params = ModelParams::init(toy_hyper(kind), 3);
    auto out = encode(params, ids({3, 4, 5, 6, 7}));
    CHECK(out.length() == 5);
    CHECK(out.H.rows() == params.hyper.enc_out_dim());
    CHECK_THROWS_AS(encode(params, {}), EmptySource);
  }
}

TEST_CASE("encode is deterministic given the seed") {
  auto a = ModelParams::init(toy_hyper(EncoderKind::bilstm), 17);
  auto b = ModelParams::init(toy_hyper(EncoderKind::bilstm), 17);
  auto ha = encode(a, ids({3, 4, 5}));
  auto hb = encode(b, ids({3, 4, 5}));
  CHECK((ha.H - hb.H).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unknown source ids clamp to UNK instead of failing") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 3);
  auto a = encode(params, ids({999, 4}));
  auto b = encode(params, ids({0, 4}));
  CHECK((a.H - b.H).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("attention over a single item is exact") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 5);
  auto H = encode(params, ids({4})).H;
  auto res = attend(params, H, Vec::Zero(params.hyper.dec_hidden));
  REQUIRE(res.alpha.size() == 1);
  CHECK(res.alpha(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((res.q - H.col(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("attention over identical items is uniform") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 5);
  Mat H(params.hyper.enc_out_dim(), 4);
  Vec h = Vec::Constant(params.hyper.enc_out_dim(), 0.3);
  for (int i = 0; i < 4; ++i) H.col(i) = h;
  Vec s = Vec::Constant(params.hyper.dec_hidden, -0.2);
  auto res = attend(params, H, s);
  for (int i = 0; i < 4; ++i) CHECK(res.alpha(i) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("attention matches a direct re-computation of the formula") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 11);
  const auto& hy = params.hyper;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat H(hy.enc_out_dim(), 6);
  for (int j = 0; j < H.cols(); ++j)
    for (int i = 0; i < H.rows(); ++i) H(i, j) = gauss(rng);
  Vec s(hy.dec_hidden);
  for (int i = 0; i < s.size(); ++i) s(i) = gauss(rng);

  auto res = attend(params, H, s);

  // Plain-loop oracle: score_i = v . tanh(W [h_i ; s]).
  std::vector<double> scores(6);
  for (int i = 0; i < 6; ++i) {
    double dot = 0.0;
    for (int a = 0; a < hy.att_dim; ++a) {
      double pre = 0.0;
      for (int k = 0; k < hy.enc_out_dim(); ++k) pre += params.attn_w(a, k) * H(k, i);
      for (int k = 0; k < hy.dec_hidden; ++k)
        pre += params.attn_w(a, hy.enc_out_dim() + k) * s(k);
      dot += params.attn_v(a) * std::tanh(pre);
    }
    scores[i] = dot;
  }
  double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double& v : scores) {
    v = std::exp(v - mx);
    z += v;
  }
  Vec q_oracle = Vec::Zero(hy.enc_out_dim());
  for (int i = 0; i < 6; ++i) {
    double alpha = scores[i] / z;
    CHECK(res.alpha(i) == doctest::Approx(alpha).epsilon(1e-12));
    q_oracle += alpha * H.col(i);
  }
  CHECK((res.q - q_oracle).cwiseAbs().maxCoeff() < 1e-12);

  // Attention weights are a convex combination: non-negative, sum 1, and q
  // lies in the span with residual ~0.
  CHECK(res.alpha.minCoeff() >= 0.0);
  CHECK(res.alpha.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("decode_step emits a normalized distribution") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 7);
  auto H = encode(params, ids({3, 4, 5})).H;
  auto st = initial_decoder_state(params.hyper);
  auto out = decode_step(params, 1, st, H);
  CHECK(out.log_probs.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(out.state.t == 1);
  CHECK(out.alpha.sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero output projection gives the uniform distribution") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 7);
  params.out_w.setZero();
  params.out_b.setZero();
  auto H = encode(params, ids({3, 4})).H;
  auto out = decode_step(params, 1, initial_decoder_state(params.hyper), H);
  for (int v = 0; v < params.hyper.tgt_vocab; ++v)
    CHECK(std::exp(out.log_probs(v)) ==
          doctest::Approx(1.0 / params.hyper.tgt_vocab).epsilon(1e-9));
}

TEST_CASE("teacher-forced loss decomposes into step log-probabilities") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm, 2), 13);
  auto src = ids({3, 4, 5, 6});
  auto tgt = ids({4, 7, 3, 2});
  double loss = sequence_loss(params, src, tgt);

  auto H = encode(params, src).H;
  auto st = initial_decoder_state(params.hyper);
  double sum = 0.0;
  int prev = 1;  // BOS
  for (int y : tgt) {
    auto out = decode_step(params, prev, st, H);
    sum -= out.log_probs(y);
    st = out.state;
    prev = y;
  }
  CHECK(loss == doctest::Approx(sum / tgt.size()).epsilon(1e-12));
}

TEST_CASE("zero-length targets have zero loss and zero gradients") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm), 3);
  CHECK(sequence_loss(params, ids({3, 4}), {}) == 0.0);
  auto grads = ModelParams::zeros(params.hyper);
  CHECK(sequence_gradients(params, ids({3, 4}), {}, grads) == 0.0);
  double max_abs = 0.0;
  grads.for_each_tensor([&](const std::string&, const auto& t) {
    if (t.size() > 0) max_abs = std::max(max_abs, t.cwiseAbs().maxCoeff());
  });
  CHECK(max_abs == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
  auto src = ids({3, 4, 5, 6, 3});
  auto tgt = ids({4, 7, 3, 8, 2});
  for (auto kind : {EncoderKind::bilstm, EncoderKind::cnn_pooling}) {
    auto params = ModelParams::init(toy_hyper(kind), 29);
    double err = grad_check(params, src, tgt, 1e-5);
    INFO("encoder ", to_string(kind));
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gradient check passes with a two-layer decoder") {
  auto params = ModelParams::init(toy_hyper(EncoderKind::bilstm, 2), 31);
  double err = grad_check(params, ids({3, 4, 5}), ids({4, 7, 2}), 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("training reduces the loss and is deterministic") {
  // Memorization set: y = reversed source pattern over a tiny vocab.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> tok(3, 9), len(2, 5);
  std::vector<TokenPair> data;
  for (int i = 0; i < 24; ++i) {
    TokenPair p;
    int L = len(rng);
    for (int k = 0; k < L; ++k) p.src.push_back(tok(rng));
    p.tgt = p.src;
    std::reverse(p.tgt.begin(), p.tgt.end());
    p.tgt.push_back(2);  // EOS
    data.push_back(p);
  }
  auto hyper = toy_hyper(EncoderKind::bilstm);
  hyper.epochs = 30;
  hyper.batch_size = 8;
  hyper.seed = 11;

  auto init_params = ModelParams::init(hyper, hyper.seed);
  double init_loss = mean_loss(init_params, data);

  auto run1 = train_model(data, {}, hyper);
  auto run2 = train_model(data, {}, hyper);
  REQUIRE(run1.log.entries.size() == 30);
  CHECK(run1.log.entries[0].train_loss < init_loss);
  CHECK(run1.log.entries.back().train_loss < run1.log.entries[0].train_loss);
  for (std::size_t i = 0; i < run1.log.entries.size(); ++i) {
    CHECK(run1.log.entries[i].train_loss == run2.log.entries[i].train_loss);
  }
  double final_loss = mean_loss(run1.params, data);
  CHECK(final_loss < 0.12);  // memorization head-room on 24 tiny samples
}

TEST_CASE("beam width 1 equals greedy decoding on random checkpoints") {
  for (int trial = 0; trial < 20; ++trial) {
    auto hyper = toy_hyper(trial % 2 ? EncoderKind::bilstm : EncoderKind::cnn_pooling);
    auto params = ModelParams::init(hyper, 1000 + trial);
    auto H = encode(params, ids({3, 4, 5})).H;

    struct Scorer {
      const ModelParams& p;
      const Mat& H;
      DecoderState initial_state() const { return initial_decoder_state(p.hyper); }
      void step(const DecoderState& st, int prev, Vec& lp, DecoderState& next) const {
        auto out = decode_step(p, prev, st, H);
        lp = std::move(out.log_probs);
        next = std::move(out.state);
      }
    } scorer{params, H};

    auto beam = beam_search(scorer, 1, 2, 1, 0.0, 8);
    REQUIRE(beam.size() == 1);

    // Greedy reference: repeated argmax.
    std::vector<int> greedy;
    auto st = initial_decoder_state(hyper);
    int prev = 1;
    for (int step = 0; step < 8; ++step) {
      auto out = decode_step(params, prev, st, H);
      int best = 0;
      for (int v = 1; v < hyper.tgt_vocab; ++v)
        if (out.log_probs(v) > out.log_probs(best)) best = v;
      greedy.push_back(best);
      if (best == 2) break;
      st = out.state;
      prev = best;
    }
    CHECK(beam[0].tokens == greedy);
  }
}

namespace {

// Table-driven scorer for the enumeration oracle: state is the prefix; the
// step distribution depends only on the prefix length.
struct TableScorer {
  std::vector<Vec> dists;  // log-probs per step
  using State = int;
  State initial_state() const { return 0; }
  void step(const State& st, int, Vec& lp, State& next) const {
    lp = dists[std::min<std::size_t>(st, dists.size() - 1)];
    next = st + 1;
  }
};

}  // namespace

TEST_CASE("length normalization: alpha 0 keeps raw log-probs") {
  CHECK(length_penalty(7, 0.0) == doctest::Approx(1.0));
  CHECK(length_penalty(1, 0.6) == doctest::Approx(1.0));  // (5+1)^a / 6^a
  TableScorer scorer;
  Vec d(3);
  d << std::log(0.5), std::log(0.3), std::log(0.2);  // ids: 0=a, 1=b, 2=eos
  scorer.dists = {d, d, d};
  auto res = beam_search(scorer, 1, 2, 3, 0.0, 3);
  for (const auto& h : res)
    CHECK(h.normalized_score == doctest::Approx(h.log_prob).epsilon(1e-12));
}

TEST_CASE("beam search matches exhaustive enumeration on a toy model") {
  // Three steps, vocab {0, 1, eos=2}; probabilities chosen so the best
  // normalized candidates survive a width-2 beam.
  TableScorer scorer;
  Vec d1(3), d2(3), d3(3);
  d1 << std::log(0.60), std::log(0.30), std::log(0.10);
  d2 << std::log(0.20), std::log(0.30), std::log(0.50);
  d3 << std::log(0.05), std::log(0.05), std::log(0.90);
  scorer.dists = {d1, d2, d3};
  const double alpha = 0.7;
  const int max_len = 3;

  // Oracle: enumerate every sequence of length <= 3 (EOS-terminated or cut
  // off at max_len) and rank by normalized score.
  struct Cand {
    std::vector<int> tokens;
    double lp;
    double norm;
  };
  std::vector<Cand> all;
  std::function<void(std::vector<int>, double, int)> walk = [&](std::vector<int> prefix,
                                                                double lp, int depth) {
    if (!prefix.empty() && prefix.back() == 2) {
      all.push_back({prefix, lp, lp / length_penalty(prefix.size(), alpha)});
      return;
    }
    if (depth == max_len) {
      all.push_back({prefix, lp, lp / length_penalty(prefix.size(), alpha)});
      return;
    }
    const Vec& d = scorer.dists[depth];
    for (int v = 0; v < 3; ++v) {
      auto next = prefix;
      next.push_back(v);
      walk(next, lp + d(v), depth + 1);
    }
  };
  walk({}, 0.0, 0);
  std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) { return a.norm > b.norm; });

  auto beam = beam_search(scorer, 1, 2, 2, alpha, max_len);
  REQUIRE(beam.size() == 2);
  for (std::size_t i = 0; i < beam.size(); ++i) {
    CHECK(beam[i].tokens == all[i].tokens);
    CHECK(beam[i].normalized_score == doctest::Approx(all[i].norm).epsilon(1e-12));
  }
  // Scores are non-increasing and bounded by the beam width.
  for (std::size_t i = 1; i < beam.size(); ++i)
    CHECK(beam[i - 1].normalized_score >= beam[i].normalized_score);
}

TEST_CASE("checkpoint round trip is bit-exact at storage precision") {
  auto hyper = toy_hyper(EncoderKind::cnn_pooling, 2);
  Vocabulary sv, tv;
  for (int i = 0; i < hyper.src_vocab - 3; ++i) sv.add("s" + std::to_string(i));
  for (int i = 0; i < hyper.tgt_vocab - 3; ++i) tv.add("t" + std::to_string(i));
  Checkpoint ckpt{ModelParams::init(hyper, 77), sv, tv};

  auto dir = (std::filesystem::temp_directory_path() / "mrgen_ckpt_test").string();
  std::filesystem::remove_all(dir);
  save_checkpoint(ckpt, dir);
  auto loaded = load_checkpoint(dir);

  CHECK(loaded.src_vocab.tokens() == ckpt.src_vocab.tokens());
  CHECK(loaded.tgt_vocab.tokens() == ckpt.tgt_vocab.tokens());
  // Bit-exactness: saving the loaded model reproduces params.bin exactly.
  auto dir2 = (std::filesystem::temp_directory_path() / "mrgen_ckpt_test2").string();
  std::filesystem::remove_all(dir2);
  save_checkpoint(loaded, dir2);
  std::ifstream b1(dir + "/params.bin", std::ios::binary);
  std::ifstream b2(dir2 + "/params.bin", std::ios::binary);
  std::string c1((std::istreambuf_iterator<char>(b1)), std::istreambuf_iterator<char>());
  std::string c2((std::istreambuf_iterator<char>(b2)), std::istreambuf_iterator<char>());
  CHECK(c1 == c2);
  CHECK(!c1.empty());
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("checkpoint loader rejects damage") {
  auto hyper = toy_hyper(EncoderKind::bilstm);
  Vocabulary sv, tv;
  for (int i = 0; i < hyper.src_vocab - 3; ++i) sv.add("s" + std::to_string(i));
  for (int i = 0; i < hyper.tgt_vocab - 3; ++i) tv.add("t" + std::to_string(i));
  Checkpoint ckpt{ModelParams::init(hyper, 7), sv, tv};
  auto dir = (std::filesystem::temp_directory_path() / "mrgen_ckpt_damage").string();
  std::filesystem::remove_all(dir);
  save_checkpoint(ckpt, dir);

  SUBCASE("truncated params.bin") {
    auto path = dir + "/params.bin";
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size / 2);
    CHECK_THROWS_AS(load_checkpoint(dir), IoError);
  }
  SUBCASE("edited shape field") {
    std::ifstream in(dir + "/manifest.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"enc_hidden\": 8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 15, "\"enc_hidden\": 9");
    std::ofstream out(dir + "/manifest.json", std::ios::trunc);
    out << text;
    out.close();
    CHECK_THROWS_AS(load_checkpoint(dir), ShapeMismatch);
  }
  SUBCASE("unsupported version") {
    std::ifstream in(dir + "/manifest.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 19, "\"format_version\": 9");
    std::ofstream out(dir + "/manifest.json", std::ios::trunc);
    out << text;
    out.close();
    CHECK_THROWS_AS(load_checkpoint(dir), VersionMismatch);
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(load_checkpoint(dir + "_nope"), IoError);
  }
  std::filesystem::remove_all(dir);
}
