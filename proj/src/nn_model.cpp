#include "mrgen/nn/model.hpp"

#include <cmath>

namespace mrgen::nn {

std::string to_string(EncoderKind k) {
  return k == EncoderKind::bilstm ? "bilstm" : "cnn_pooling";
}

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "bilstm") return EncoderKind::bilstm;
  if (s == "cnn_pooling" || s == "cnn") return EncoderKind::cnn_pooling;
  throw ConfigError("unknown encoder kind: " + s);
}

void Hyperparams::validate() const {
  if (src_vocab < 4 || tgt_vocab < 4)
    throw ConfigError("vocab sizes must include the reserved ids");
  if (embed_dim < 1 || enc_hidden < 1 || dec_hidden < 1 || att_dim < 1)
    throw ConfigError("model dimensions must be >= 1");
  if (dec_layers < 1) throw ConfigError("decoder needs at least one layer");
  if (length_alpha < 0.0 || length_alpha > 2.0)
    throw ConfigError("length penalty alpha must be in [0, 2]");
  if (beam_width < 1) throw ConfigError("beam width must be >= 1");
  if (cnn_window < 1 || cnn_max_pos < 1) throw ConfigError("bad cnn encoder dims");
  if (max_decode_len < 1) throw ConfigError("max decode length must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

namespace {

LstmParams lstm_zeros(int hidden, int in) {
  return {Mat::Zero(4 * hidden, in), Mat::Zero(4 * hidden, hidden), Vec::Zero(4 * hidden)};
}

int dec_input_dim(const Hyperparams& h, int layer) {
  return layer == 0 ? h.embed_dim + h.enc_out_dim() : h.dec_hidden;
}

}  // namespace

ModelParams ModelParams::zeros(const Hyperparams& hyper) {
  hyper.validate();
  ModelParams p;
  p.hyper = hyper;
  p.src_embed = Mat::Zero(hyper.embed_dim, hyper.src_vocab);
  p.tgt_embed = Mat::Zero(hyper.embed_dim, hyper.tgt_vocab);
  p.enc_fwd = lstm_zeros(hyper.enc_hidden, hyper.embed_dim);
  p.enc_bwd = lstm_zeros(hyper.enc_hidden, hyper.embed_dim);
  p.cnn_pos = Mat::Zero(hyper.embed_dim, hyper.cnn_max_pos);
  p.cnn_proj = Mat::Zero(hyper.enc_out_dim(), hyper.embed_dim);
  p.cnn_b = Vec::Zero(hyper.enc_out_dim());
  p.attn_w = Mat::Zero(hyper.att_dim, hyper.enc_out_dim() + hyper.dec_hidden);
  p.attn_v = Vec::Zero(hyper.att_dim);
  for (int l = 0; l < hyper.dec_layers; ++l)
    p.dec.push_back(lstm_zeros(hyper.dec_hidden, dec_input_dim(hyper, l)));
  p.out_w = Mat::Zero(hyper.tgt_vocab, hyper.dec_hidden + hyper.enc_out_dim() + hyper.embed_dim);
  p.out_b = Vec::Zero(hyper.tgt_vocab);
  return p;
}

void ModelParams::set_zero() {
  for_each_tensor([](const std::string&, auto& t) { t.setZero(); });
}

ModelParams ModelParams::init(const Hyperparams& hyper, unsigned long long seed) {
  ModelParams p = zeros(hyper);
  std::mt19937_64 rng(seed);
  p.for_each_tensor([&](const std::string& name, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat>) {
      double scale = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
      if (name == "src_embed" || name == "tgt_embed" || name == "cnn_pos") scale = 0.08;
      uniform_init(t, rng, scale);
    } else if (name == "attn_v") {
      uniform_init(t, rng, std::sqrt(3.0 / static_cast<double>(t.size())));
    } else {
      t.setZero();
    }
  });
  // Forget-gate bias starts positive so memory survives early training.
  auto open_forget = [&](LstmParams& lstm, int hidden) {
    lstm.b.segment(hidden, hidden).setConstant(1.0);
  };
  open_forget(p.enc_fwd, hyper.enc_hidden);
  open_forget(p.enc_bwd, hyper.enc_hidden);
  for (auto& layer : p.dec) open_forget(layer, hyper.dec_hidden);
  return p;
}

namespace {

inline Vec sigmoid(const Vec& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

struct CellCache {
  Vec x, gi, gf, gg, go, c;
};

void cell_forward(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev,
                  CellCache& cache, Vec& h_out, Vec& c_out) {
  const int H = static_cast<int>(p.wh.cols());
  Vec z = p.wx * x + p.wh * h_prev + p.b;
  cache.x = x;
  cache.gi = sigmoid(z.head(H));
  cache.gf = sigmoid(z.segment(H, H));
  cache.gg = z.segment(2 * H, H).array().tanh();
  cache.go = sigmoid(z.tail(H));
  c_out = cache.gf.cwiseProduct(c_prev) + cache.gi.cwiseProduct(cache.gg);
  cache.c = c_out;
  h_out = cache.go.cwiseProduct(c_out.array().tanh().matrix());
}

void cell_backward(const LstmParams& p, const CellCache& cache, const Vec& h_prev,
                   const Vec& c_prev, const Vec& dh, const Vec& dc_in, LstmParams& g, Vec& dx,
                   Vec& dh_prev, Vec& dc_prev) {
  const int H = static_cast<int>(p.wh.cols());
  Vec tc = cache.c.array().tanh().matrix();
  Vec do_ = dh.cwiseProduct(tc);
  Vec dc = dc_in + dh.cwiseProduct(cache.go).cwiseProduct(
                       (1.0 - tc.array().square()).matrix());
  Vec di = dc.cwiseProduct(cache.gg);
  Vec df = dc.cwiseProduct(c_prev);
  Vec dgg = dc.cwiseProduct(cache.gi);
  dc_prev = dc.cwiseProduct(cache.gf);

  Vec dz(4 * H);
  dz.head(H) = di.array() * cache.gi.array() * (1.0 - cache.gi.array());
  dz.segment(H, H) = df.array() * cache.gf.array() * (1.0 - cache.gf.array());
  dz.segment(2 * H, H) = dgg.array() * (1.0 - cache.gg.array().square());
  dz.tail(H) = do_.array() * cache.go.array() * (1.0 - cache.go.array());

  g.wx.noalias() += dz * cache.x.transpose();
  g.wh.noalias() += dz * h_prev.transpose();
  g.b += dz;
  dx.noalias() = p.wx.transpose() * dz;
  dh_prev.noalias() = p.wh.transpose() * dz;
}

struct LstmSeqCache {
  std::vector<CellCache> steps;
  Mat h;  // (H x T)
};

void lstm_seq_forward(const LstmParams& p, const Mat& X, LstmSeqCache& cache) {
  const int H = static_cast<int>(p.wh.cols());
  const int T = static_cast<int>(X.cols());
  cache.steps.resize(T);
  cache.h.resize(H, T);
  Vec h_prev = Vec::Zero(H), c_prev = Vec::Zero(H), h_out(H), c_out(H);
  for (int t = 0; t < T; ++t) {
    cell_forward(p, X.col(t), h_prev, c_prev, cache.steps[t], h_out, c_out);
    cache.h.col(t) = h_out;
    h_prev = h_out;
    c_prev = c_out;
  }
}

// dX gets the input gradients; parameter gradients accumulate into g.
Mat lstm_seq_backward(const LstmParams& p, const Mat& X, const LstmSeqCache& cache,
                      const Mat& dH_out, LstmParams& g) {
  const int H = static_cast<int>(p.wh.cols());
  const int T = static_cast<int>(X.cols());
  Mat dX = Mat::Zero(X.rows(), T);
  Vec dh_carry = Vec::Zero(H), dc_carry = Vec::Zero(H);
  Vec dx(X.rows()), dh_prev(H), dc_prev(H);
  for (int t = T - 1; t >= 0; --t) {
    Vec h_prev = t > 0 ? Vec(cache.h.col(t - 1)) : Vec(Vec::Zero(H));
    Vec c_prev = t > 0 ? cache.steps[t - 1].c : Vec(Vec::Zero(H));
    Vec dh = dH_out.col(t) + dh_carry;
    cell_backward(p, cache.steps[t], h_prev, c_prev, dh, dc_carry, g, dx, dh_prev, dc_prev);
    dX.col(t) = dx;
    dh_carry = dh_prev;
    dc_carry = dc_prev;
  }
  return dX;
}

struct EncCache {
  std::vector<int> ids;  // clamped source ids
  Mat X;                 // embeddings
  LstmSeqCache fwd, bwd;
  Mat P, M;  // cnn position-augmented embeddings and window means
  Mat H;
};

int clamp_id(int id, int vocab) { return id >= 0 && id < vocab ? id : 0; }

void encode_cached(const ModelParams& params, const std::vector<int>& src, EncCache& cache) {
  const auto& h = params.hyper;
  if (src.empty()) throw EmptySource("encode: empty source sequence");
  const int L = static_cast<int>(src.size());
  cache.ids.resize(L);
  cache.X.resize(h.embed_dim, L);
  for (int i = 0; i < L; ++i) {
    cache.ids[i] = clamp_id(src[i], h.src_vocab);
    cache.X.col(i) = params.src_embed.col(cache.ids[i]);
  }

  if (h.encoder == EncoderKind::bilstm) {
    lstm_seq_forward(params.enc_fwd, cache.X, cache.fwd);
    Mat Xrev = cache.X.rowwise().reverse();
    lstm_seq_forward(params.enc_bwd, Xrev, cache.bwd);
    cache.H.resize(h.enc_out_dim(), L);
    cache.H.topRows(h.enc_hidden) = cache.fwd.h;
    cache.H.bottomRows(h.enc_hidden) = cache.bwd.h.rowwise().reverse();
  } else {
    // Position-augmented embeddings, windowed mean, learned projection.
    cache.P = cache.X;
    for (int i = 0; i < L; ++i)
      cache.P.col(i) += params.cnn_pos.col(std::min(i, h.cnn_max_pos - 1));
    cache.M.resize(h.embed_dim, L);
    const int hw = h.cnn_window / 2;
    for (int i = 0; i < L; ++i) {
      int lo = std::max(0, i - hw), hi = std::min(L - 1, i + hw);
      cache.M.col(i) = cache.P.middleCols(lo, hi - lo + 1).rowwise().mean();
    }
    cache.H = ((params.cnn_proj * cache.M).colwise() + params.cnn_b).array().tanh();
  }
}

void encoder_backward(const ModelParams& params, const EncCache& cache, const Mat& dH,
                      ModelParams& g) {
  const auto& h = params.hyper;
  const int L = static_cast<int>(cache.ids.size());
  Mat dX;
  if (h.encoder == EncoderKind::bilstm) {
    Mat dX_fwd = lstm_seq_backward(params.enc_fwd, cache.X, cache.fwd,
                                   dH.topRows(h.enc_hidden), g.enc_fwd);
    Mat Xrev = cache.X.rowwise().reverse();
    Mat dH_bwd = dH.bottomRows(h.enc_hidden).rowwise().reverse();
    Mat dX_bwd = lstm_seq_backward(params.enc_bwd, Xrev, cache.bwd, dH_bwd, g.enc_bwd);
    dX = dX_fwd + dX_bwd.rowwise().reverse();
  } else {
    Mat dPre = dH.cwiseProduct((1.0 - cache.H.array().square()).matrix());
    g.cnn_proj.noalias() += dPre * cache.M.transpose();
    g.cnn_b += dPre.rowwise().sum();
    Mat dM = params.cnn_proj.transpose() * dPre;
    Mat dP = Mat::Zero(h.embed_dim, L);
    const int hw = h.cnn_window / 2;
    for (int i = 0; i < L; ++i) {
      int lo = std::max(0, i - hw), hi = std::min(L - 1, i + hw);
      double inv = 1.0 / static_cast<double>(hi - lo + 1);
      for (int j = lo; j <= hi; ++j) dP.col(j) += dM.col(i) * inv;
    }
    for (int i = 0; i < L; ++i)
      g.cnn_pos.col(std::min(i, h.cnn_max_pos - 1)) += dP.col(i);
    dX = dP;
  }
  for (int i = 0; i < L; ++i) g.src_embed.col(cache.ids[i]) += dX.col(i);
}

struct AttnCache {
  Mat Tn;     // (A x L)
  Vec alpha;  // (L)
  Vec q;      // (E)
};

void attend_cached(const ModelParams& params, const Mat& H, const Mat& WH, const Vec& s_prev,
                   AttnCache& att) {
  const auto& h = params.hyper;
  Vec ws = params.attn_w.rightCols(h.dec_hidden) * s_prev;  // (A)
  att.Tn = ((WH.colwise() + ws).array().tanh()).matrix();
  Vec scores = att.Tn.transpose() * params.attn_v;
  att.alpha = softmax(scores);
  att.q.noalias() = H * att.alpha;
}

// Returns the gradient w.r.t. the previous top decoder state.
Vec attend_backward(const ModelParams& params, const Mat& H, const AttnCache& att,
                    const Vec& s_prev, const Vec& dq, Mat& dH, ModelParams& g) {
  const auto& h = params.hyper;
  const int E = h.enc_out_dim();
  Vec dalpha = H.transpose() * dq;
  dH.noalias() += dq * att.alpha.transpose();
  double s0 = att.alpha.dot(dalpha);
  Vec da = (att.alpha.array() * (dalpha.array() - s0)).matrix();
  g.attn_v.noalias() += att.Tn * da;
  Mat dPre = (params.attn_v * da.transpose()).cwiseProduct(
      (1.0 - att.Tn.array().square()).matrix());
  g.attn_w.leftCols(E).noalias() += dPre * H.transpose();
  dH.noalias() += params.attn_w.leftCols(E).transpose() * dPre;
  Vec rsum = dPre.rowwise().sum();
  g.attn_w.rightCols(h.dec_hidden).noalias() += rsum * s_prev.transpose();
  return params.attn_w.rightCols(h.dec_hidden).transpose() * rsum;
}

struct DecStepCache {
  AttnCache att;
  Vec s_prev_top;
  std::vector<CellCache> cells;
  std::vector<Vec> h, c;
  Vec r;
  Vec p;  // output distribution
  int u_prev = 0;
};

}  // namespace

EncoderOutput encode(const ModelParams& params, const std::vector<int>& src) {
  EncCache cache;
  encode_cached(params, src, cache);
  return {cache.H};
}

AttentionResult attend(const ModelParams& params, const Mat& H, const Vec& s_prev_top) {
  Mat WH = params.attn_w.leftCols(params.hyper.enc_out_dim()) * H;
  AttnCache att;
  attend_cached(params, H, WH, s_prev_top, att);
  return {att.alpha, att.q};
}

DecoderState initial_decoder_state(const Hyperparams& hyper) {
  DecoderState st;
  st.h.assign(hyper.dec_layers, Vec::Zero(hyper.dec_hidden));
  st.c.assign(hyper.dec_layers, Vec::Zero(hyper.dec_hidden));
  st.t = 0;
  return st;
}

StepResult decode_step(const ModelParams& params, int u_prev, const DecoderState& state,
                       const Mat& H) {
  const auto& h = params.hyper;
  StepResult out;
  out.state = state;

  AttentionResult att = attend(params, H, state.h[h.dec_layers - 1]);
  Vec e = params.tgt_embed.col(clamp_id(u_prev, h.tgt_vocab));
  Vec x(h.embed_dim + h.enc_out_dim());
  x << e, att.q;

  CellCache scratch;
  Vec h_out(h.dec_hidden), c_out(h.dec_hidden);
  for (int l = 0; l < h.dec_layers; ++l) {
    cell_forward(params.dec[l], x, state.h[l], state.c[l], scratch, h_out, c_out);
    out.state.h[l] = h_out;
    out.state.c[l] = c_out;
    x = h_out;
  }
  Vec r(h.dec_hidden + h.enc_out_dim() + h.embed_dim);
  r << out.state.h[h.dec_layers - 1], att.q, e;
  out.log_probs = log_softmax(params.out_w * r + params.out_b);
  out.alpha = att.alpha;
  out.state.t = state.t + 1;
  return out;
}

namespace {

double forward_teacher_forced(const ModelParams& params, const std::vector<int>& src,
                              const std::vector<int>& tgt, EncCache* enc,
                              std::vector<DecStepCache>* steps) {
  const auto& h = params.hyper;
  const int T = static_cast<int>(tgt.size());
  if (T == 0) return 0.0;

  EncCache local_enc;
  EncCache& e = enc ? *enc : local_enc;
  encode_cached(params, src, e);
  Mat WH = params.attn_w.leftCols(h.enc_out_dim()) * e.H;

  std::vector<Vec> h_prev(h.dec_layers, Vec::Zero(h.dec_hidden));
  std::vector<Vec> c_prev(h.dec_layers, Vec::Zero(h.dec_hidden));
  double loss = 0.0;
  const int bos = 1;
  if (steps) steps->resize(T);

  for (int t = 0; t < T; ++t) {
    DecStepCache local_step;
    DecStepCache& sc = steps ? (*steps)[t] : local_step;
    sc.u_prev = t == 0 ? bos : clamp_id(tgt[t - 1], h.tgt_vocab);
    sc.s_prev_top = h_prev[h.dec_layers - 1];
    attend_cached(params, e.H, WH, sc.s_prev_top, sc.att);

    Vec emb = params.tgt_embed.col(sc.u_prev);
    Vec x(h.embed_dim + h.enc_out_dim());
    x << emb, sc.att.q;

    sc.cells.resize(h.dec_layers);
    sc.h.resize(h.dec_layers);
    sc.c.resize(h.dec_layers);
    Vec h_out(h.dec_hidden), c_out(h.dec_hidden);
    for (int l = 0; l < h.dec_layers; ++l) {
      cell_forward(params.dec[l], x, h_prev[l], c_prev[l], sc.cells[l], h_out, c_out);
      sc.h[l] = h_out;
      sc.c[l] = c_out;
      x = h_out;
    }
    sc.r.resize(h.dec_hidden + h.enc_out_dim() + h.embed_dim);
    sc.r << sc.h[h.dec_layers - 1], sc.att.q, emb;
    Vec lp = log_softmax(params.out_w * sc.r + params.out_b);
    int y = clamp_id(tgt[t], h.tgt_vocab);
    loss -= lp(y);
    sc.p = lp.array().exp();
    for (int l = 0; l < h.dec_layers; ++l) {
      h_prev[l] = sc.h[l];
      c_prev[l] = sc.c[l];
    }
  }
  return loss / T;
}

}  // namespace

double sequence_loss(const ModelParams& params, const std::vector<int>& src,
                     const std::vector<int>& tgt) {
  return forward_teacher_forced(params, src, tgt, nullptr, nullptr);
}

double sequence_gradients(const ModelParams& params, const std::vector<int>& src,
                          const std::vector<int>& tgt, ModelParams& grads) {
  const auto& h = params.hyper;
  const int T = static_cast<int>(tgt.size());
  if (T == 0) return 0.0;

  EncCache enc;
  std::vector<DecStepCache> steps;
  double loss = forward_teacher_forced(params, src, tgt, &enc, &steps);

  const int D = h.dec_hidden, E = h.enc_out_dim(), de = h.embed_dim;
  const int top = h.dec_layers - 1;
  Mat dH = Mat::Zero(E, enc.H.cols());
  std::vector<Vec> dh_next(h.dec_layers, Vec::Zero(D));
  std::vector<Vec> dc_next(h.dec_layers, Vec::Zero(D));
  Vec ds_attn_pending = Vec::Zero(D);
  const double inv_T = 1.0 / T;

  for (int t = T - 1; t >= 0; --t) {
    const auto& sc = steps[t];
    Vec dlogits = sc.p;
    dlogits(clamp_id(tgt[t], h.tgt_vocab)) -= 1.0;
    dlogits *= inv_T;

    grads.out_w.noalias() += dlogits * sc.r.transpose();
    grads.out_b += dlogits;
    Vec dr = params.out_w.transpose() * dlogits;

    Vec dq = dr.segment(D, E);
    Vec demb = dr.tail(de);
    Vec dx_above;
    Vec dx(1), dh_prev(D), dc_prev(D);
    for (int l = top; l >= 0; --l) {
      Vec dh_l = l == top ? Vec(dr.head(D) + dh_next[top] + ds_attn_pending)
                          : Vec(dx_above + dh_next[l]);
      Vec h_prev_l = t > 0 ? steps[t - 1].h[l] : Vec(Vec::Zero(D));
      Vec c_prev_l = t > 0 ? steps[t - 1].c[l] : Vec(Vec::Zero(D));
      dx.resize(params.dec[l].wx.cols());
      cell_backward(params.dec[l], sc.cells[l], h_prev_l, c_prev_l, dh_l, dc_next[l],
                    grads.dec[l], dx, dh_prev, dc_prev);
      dh_next[l] = dh_prev;
      dc_next[l] = dc_prev;
      if (l > 0)
        dx_above = dx;
    }
    demb += dx.head(de);
    dq += dx.tail(E);

    Vec ds_prev =
        attend_backward(params, enc.H, sc.att, sc.s_prev_top, dq, dH, grads);
    ds_attn_pending = t > 0 ? ds_prev : Vec(Vec::Zero(D));
    grads.tgt_embed.col(sc.u_prev) += demb;
  }
  encoder_backward(params, enc, dH, grads);
  return loss;
}

double grad_check(const ModelParams& params, const std::vector<int>& src,
                  const std::vector<int>& tgt, double eps) {
  ModelParams grads = ModelParams::zeros(params.hyper);
  sequence_gradients(params, src, tgt, grads);

  ModelParams probe = params;
  double max_rel = 0.0;
  // Walk tensors pairwise; for_each_tensor enumerates in a fixed order.
  std::vector<Mat*> probe_mats;
  std::vector<Vec*> probe_vecs;
  std::vector<const Mat*> grad_mats;
  std::vector<const Vec*> grad_vecs;
  probe.for_each_tensor([&](const std::string&, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat>)
      probe_mats.push_back(&t);
    else
      probe_vecs.push_back(&t);
  });
  grads.for_each_tensor([&](const std::string&, auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat>)
      grad_mats.push_back(&t);
    else
      grad_vecs.push_back(&t);
  });

  auto check_entry = [&](double& theta, double analytic) {
    double orig = theta;
    theta = orig + eps;
    double lp = sequence_loss(probe, src, tgt);
    theta = orig - eps;
    double lm = sequence_loss(probe, src, tgt);
    theta = orig;
    double numeric = (lp - lm) / (2.0 * eps);
    double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    double rel = std::abs(analytic - numeric) / denom;
    // Entries where both gradients vanish are exact.
    if (std::abs(analytic) < 1e-12 && std::abs(numeric) < 1e-10) rel = 0.0;
    max_rel = std::max(max_rel, rel);
  };

  for (std::size_t k = 0; k < probe_mats.size(); ++k) {
    Mat& m = *probe_mats[k];
    const Mat& g = *grad_mats[k];
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) check_entry(m(i, j), g(i, j));
  }
  for (std::size_t k = 0; k < probe_vecs.size(); ++k) {
    Vec& v = *probe_vecs[k];
    const Vec& g = *grad_vecs[k];
    for (Eigen::Index i = 0; i < v.size(); ++i) check_entry(v(i), g(i));
  }
  return max_rel;
}

}  // namespace mrgen::nn
