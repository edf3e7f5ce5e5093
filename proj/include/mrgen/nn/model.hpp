#pragma once

#include <string>
#include <vector>

#include "mrgen/error.hpp"
#include "mrgen/nn/core.hpp"

namespace mrgen::nn {

enum class EncoderKind { bilstm, cnn_pooling };

std::string to_string(EncoderKind k);
EncoderKind encoder_kind_from_string(const std::string& s);

enum class OptimizerKind { adam, sgd };

struct Hyperparams {
  int src_vocab = 0;
  int tgt_vocab = 0;
  int embed_dim = 32;
  EncoderKind encoder = EncoderKind::bilstm;
  int enc_hidden = 64;   // cells per direction; paper default 512
  int dec_layers = 1;    // paper default 4
  int dec_hidden = 64;   // cells per layer; paper default 512
  int att_dim = 64;
  int cnn_window = 3;
  int cnn_max_pos = 64;
  int beam_width = 10;
  double length_alpha = 0.6;  // 0.9 tv, 1.0 laptop
  int max_decode_len = 60;
  double learning_rate = 1e-3;
  int epochs = 12;
  int batch_size = 16;
  OptimizerKind optimizer = OptimizerKind::adam;
  unsigned long long seed = 1;

  int enc_out_dim() const { return 2 * enc_hidden; }
  void validate() const;
};

struct LstmParams {
  Mat wx;  // (4H x In), gate rows ordered i,f,g,o
  Mat wh;  // (4H x H)
  Vec b;   // (4H)
};

struct ModelParams {
  Hyperparams hyper;

  Mat src_embed;  // (embed x src_vocab)
  Mat tgt_embed;  // (embed x tgt_vocab)

  LstmParams enc_fwd, enc_bwd;  // bilstm encoder
  Mat cnn_pos;                  // (embed x cnn_max_pos)
  Mat cnn_proj;                 // (enc_out x embed)
  Vec cnn_b;                    // (enc_out)

  Mat attn_w;  // (att x (enc_out + dec_hidden)), the MLP's first layer
  Vec attn_v;  // (att), the MLP's second layer

  std::vector<LstmParams> dec;  // layer 0 input: embed + enc_out; above: dec_hidden

  Mat out_w;  // (tgt_vocab x (dec_hidden + enc_out + embed))
  Vec out_b;  // (tgt_vocab)

  static ModelParams zeros(const Hyperparams& hyper);
  static ModelParams init(const Hyperparams& hyper, unsigned long long seed);

  void set_zero();

  // Enumerates (name, tensor) in checkpoint index order.
  template <typename F>
  void for_each_tensor(F&& f) {
    f("src_embed", src_embed);
    f("tgt_embed", tgt_embed);
    f("enc_fwd.wx", enc_fwd.wx);
    f("enc_fwd.wh", enc_fwd.wh);
    f("enc_fwd.b", enc_fwd.b);
    f("enc_bwd.wx", enc_bwd.wx);
    f("enc_bwd.wh", enc_bwd.wh);
    f("enc_bwd.b", enc_bwd.b);
    f("cnn_pos", cnn_pos);
    f("cnn_proj", cnn_proj);
    f("cnn_b", cnn_b);
    f("attn_w", attn_w);
    f("attn_v", attn_v);
    for (std::size_t l = 0; l < dec.size(); ++l) {
      std::string prefix = "dec" + std::to_string(l);
      f(prefix + ".wx", dec[l].wx);
      f(prefix + ".wh", dec[l].wh);
      f(prefix + ".b", dec[l].b);
    }
    f("out_w", out_w);
    f("out_b", out_b);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](const std::string& name, auto& t) { f(name, std::as_const(t)); });
  }
};

// Encoder output: columns are the per-position hidden vectors h_1..h_L.
struct EncoderOutput {
  Mat H;  // (enc_out x L)
  int length() const { return static_cast<int>(H.cols()); }
};

// [OP] encode: maps token ids to per-position hidden states; both encoder
// kinds produce exactly L columns. Out-of-range ids clamp to the UNK id (0).
EncoderOutput encode(const ModelParams& params, const std::vector<int>& src);

struct AttentionResult {
  Vec alpha;  // attention weights, sum to 1
  Vec q;      // context vector, convex combination of encoder columns
};

// alpha_i = softmax_i(v' tanh(W [h_i ; s_prev])), q = H alpha.
AttentionResult attend(const ModelParams& params, const Mat& H, const Vec& s_prev_top);

// Incremental decoder state for greedy/beam decoding.
struct DecoderState {
  std::vector<Vec> h, c;  // per layer
  int t = 0;
};

DecoderState initial_decoder_state(const Hyperparams& hyper);

struct StepResult {
  Vec log_probs;  // (tgt_vocab), log-softmax of the readout
  Vec alpha;      // attention weights used at this step
  DecoderState state;
};

// One decode step: attention from the previous top-layer state, cell stack
// update, readout over [s_t ; q_t ; e(u_prev)].
StepResult decode_step(const ModelParams& params, int u_prev, const DecoderState& state,
                       const Mat& H);

// Mean per-token cross-entropy of the target sequence under teacher forcing.
// The target must already carry the EOS id; an empty target scores 0.
double sequence_loss(const ModelParams& params, const std::vector<int>& src,
                     const std::vector<int>& tgt);

// Forward + backward; accumulates into `grads` (caller zeroes), returns the
// sample loss.
double sequence_gradients(const ModelParams& params, const std::vector<int>& src,
                          const std::vector<int>& tgt, ModelParams& grads);

// Central finite differences (perturbation eps) against the analytic
// gradient for every parameter group; returns the max relative error.
double grad_check(const ModelParams& params, const std::vector<int>& src,
                  const std::vector<int>& tgt, double eps);

}  // namespace mrgen::nn
