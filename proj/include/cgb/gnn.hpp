#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgb/error.hpp"
#include "cgb/graph.hpp"
#include "cgb/metrics.hpp"
#include "cgb/random.hpp"
#include "cgb/signal.hpp"
#include "cgb/types.hpp"

namespace cgb {

inline constexpr int kCheckpointSchemaVersion = 1;

enum class Activation { sigmoid, relu, linear };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::relu: return "relu";
    default: return "linear";
  }
}

inline Activation parse_activation(const std::string& name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "relu") return Activation::relu;
  fail(Errc::config_error, "activation must be \"sigmoid\" or \"relu\", got \"", name, "\"");
}

// Node embeddings live in the rows of H; every transform right-multiplies,
// so a "vector" below is one row of H.
struct ModelConfig {
  std::vector<int> layer_sizes = {16, 8};  // pyramid widths; empty bypasses the GCN entirely
  int heads = 2;
  double dropout_rate = 0.5;
  int fc_hidden_1 = 32;
  int fc_hidden_2 = 16;
  Activation layer_activation = Activation::sigmoid;
  Activation skip_activation = Activation::relu;
  std::uint64_t seed = 0;
};

inline void validate_model_config(const ModelConfig& cfg) {
  require(cfg.heads >= 1, Errc::config_error, "model.heads must be >= 1");
  require(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0, Errc::config_error,
          "model.dropout must lie in [0, 1)");
  require(cfg.fc_hidden_1 >= 1 && cfg.fc_hidden_2 >= 1, Errc::config_error,
          "model fc widths must be >= 1");
  int prev = 0;
  for (std::size_t i = 0; i < cfg.layer_sizes.size(); ++i) {
    const int w = cfg.layer_sizes[i];
    require(w >= 1, Errc::config_error, "model.layer_sizes[", i, "] must be >= 1");
    require(w % cfg.heads == 0, Errc::indivisible_width, "layer width ", w,
            " is not divisible by ", cfg.heads, " heads");
    require(i == 0 || w <= prev, Errc::config_error,
            "model.layer_sizes must be non-increasing (pyramid), got ", prev, " then ", w);
    prev = w;
  }
}

// --- Building blocks ----------------------------------------------------------

// D^{-1/2} (S + I) D^{-1/2} with D the degree diagonal of S + I.
inline Matrix normalize_adjacency(const IntMatrix& s) {
  const int n = static_cast<int>(s.rows());
  require(s.cols() == n, Errc::asymmetric_input, "adjacency must be square");
  for (int i = 0; i < n; ++i) {
    require(s(i, i) == 0, Errc::asymmetric_input, "adjacency diagonal must be zero at ", i);
    for (int j = i + 1; j < n; ++j)
      require(s(i, j) == s(j, i), Errc::asymmetric_input, "adjacency not symmetric at (", i, ", ",
              j, ")");
  }
  Vector deg(n);
  for (int i = 0; i < n; ++i) {
    double d = 1.0;  // self-loop
    for (int j = 0; j < n; ++j) d += s(i, j);
    deg(i) = d;
  }
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = (i == j ? 1.0 : static_cast<double>(s(i, j))) / std::sqrt(deg(i) * deg(j));
  return a;
}

inline Matrix apply_activation(const Matrix& x, Activation act) {
  switch (act) {
    case Activation::sigmoid:
      return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    case Activation::relu:
      return x.cwiseMax(0.0);
    default:
      return x;
  }
}

// elementwise derivative evaluated at the pre-activation
inline Matrix activation_gradient(const Matrix& pre, Activation act) {
  switch (act) {
    case Activation::sigmoid: {
      Matrix s = apply_activation(pre, Activation::sigmoid);
      return s.cwiseProduct(Matrix::Ones(pre.rows(), pre.cols()) - s);
    }
    case Activation::relu:
      return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    default:
      return Matrix::Ones(pre.rows(), pre.cols());
  }
}

inline Matrix gcn_layer(const Matrix& h, const Matrix& a_norm, const Matrix& theta,
                        Activation act) {
  require(a_norm.rows() == h.rows() && a_norm.cols() == h.rows(), Errc::shape_mismatch,
          "adjacency is ", a_norm.rows(), "x", a_norm.cols(), " for ", h.rows(), " nodes");
  require(h.cols() == theta.rows(), Errc::shape_mismatch, "embedding width ", h.cols(),
          " does not match weight rows ", theta.rows());
  return apply_activation(a_norm * h * theta, act);
}

// Row-convention multi-head transform: split h into contiguous chunks and
// right-multiply chunk j by heads[j], then concatenate.
inline Vector multi_head_transform(const Vector& h, std::span<const Matrix> heads) {
  const int k = static_cast<int>(heads.size());
  require(k >= 1, Errc::shape_mismatch, "need at least one head");
  const int f = static_cast<int>(h.size());
  require(f % k == 0, Errc::indivisible_width, "width ", f, " not divisible by ", k, " heads");
  const int w = f / k;
  Vector out(f);
  for (int j = 0; j < k; ++j) {
    require(heads[j].rows() == w && heads[j].cols() == w, Errc::shape_mismatch, "head ", j,
            " must be ", w, "x", w);
    out.segment(j * w, w) = heads[j].transpose() * h.segment(j * w, w);
  }
  return out;
}

// act(h_new) + h_prev, with h_prev routed through an optional learnable
// projection (f_prev x f_new, right-multiplied) when the widths differ.
inline Vector skip_connect(const Vector& h_new, const Vector& h_prev, const Matrix* projection,
                           Activation act = Activation::relu) {
  Vector activated = apply_activation(h_new, act);
  if (projection == nullptr) {
    require(h_new.size() == h_prev.size(), Errc::width_mismatch_without_projection,
            "skip widths ", h_prev.size(), " -> ", h_new.size(), " need a projection");
    return activated + h_prev;
  }
  require(projection->rows() == h_prev.size() && projection->cols() == h_new.size(),
          Errc::shape_mismatch, "skip projection must be ", h_prev.size(), "x", h_new.size());
  return activated + projection->transpose() * h_prev;
}

// Row-major concatenation z_1 || ... || z_n. Deliberately order-sensitive.
inline Vector concat_pool(const Matrix& z) {
  Vector out(z.rows() * z.cols());
  for (int i = 0; i < z.rows(); ++i) out.segment(i * z.cols(), z.cols()) = z.row(i);
  return out;
}

// --- Parameters ----------------------------------------------------------------

struct ParamSet {
  std::vector<Matrix> gcn_w;                // per layer, f_in x f_out
  std::vector<std::vector<Matrix>> head_w;  // per layer, per head, (f/k) x (f/k)
  std::vector<Matrix> skip_w;               // per layer, f_in x f_out; 0x0 when identity
  Matrix fc1_w, fc1_b;                      // fc1 x m, fc1 x 1
  Matrix fc2_w, fc2_b;                      // fc2 x fc1, fc2 x 1
  Matrix out_w, out_b;                      // 1 x fc2, 1 x 1
};

inline std::vector<std::pair<std::string, Matrix*>> named_tensors(ParamSet& p) {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (std::size_t l = 0; l < p.gcn_w.size(); ++l) {
    out.emplace_back("gcn_w." + std::to_string(l), &p.gcn_w[l]);
    for (std::size_t j = 0; j < p.head_w[l].size(); ++j)
      out.emplace_back("head_w." + std::to_string(l) + "." + std::to_string(j), &p.head_w[l][j]);
    if (p.skip_w[l].size() > 0)
      out.emplace_back("skip_w." + std::to_string(l), &p.skip_w[l]);
  }
  out.emplace_back("fc1_w", &p.fc1_w);
  out.emplace_back("fc1_b", &p.fc1_b);
  out.emplace_back("fc2_w", &p.fc2_w);
  out.emplace_back("fc2_b", &p.fc2_b);
  out.emplace_back("out_w", &p.out_w);
  out.emplace_back("out_b", &p.out_b);
  return out;
}

struct ModelState {
  ParamSet params;
  ParamSet adam_m, adam_v;
  long step = 0;
  int input_width = 0;  // node count the model was built for
  std::uint64_t seed = 0;
};

namespace detail {

inline ParamSet zeros_like(const ParamSet& p) {
  ParamSet z = p;
  auto wipe = [](Matrix& m) { m.setZero(); };
  for (auto& m : z.gcn_w) wipe(m);
  for (auto& layer : z.head_w)
    for (auto& m : layer) wipe(m);
  for (auto& m : z.skip_w)
    if (m.size() > 0) wipe(m);
  wipe(z.fc1_w);
  wipe(z.fc1_b);
  wipe(z.fc2_w);
  wipe(z.fc2_b);
  wipe(z.out_w);
  wipe(z.out_b);
  return z;
}

inline void glorot_fill(Matrix& m, Rng& rng, int fan_in, int fan_out) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
}

}  // namespace detail

inline ModelState init_model(const ModelConfig& cfg, int n) {
  validate_model_config(cfg);
  require(n >= 1, Errc::bad_dims, "model needs at least one node");
  Rng rng(cfg.seed);
  ModelState state;
  state.input_width = n;
  state.seed = cfg.seed;
  ParamSet& p = state.params;

  int f_prev = n;
  for (int f : cfg.layer_sizes) {
    Matrix w(f_prev, f);
    detail::glorot_fill(w, rng, f_prev, f);
    p.gcn_w.push_back(std::move(w));
    const int chunk = f / cfg.heads;
    std::vector<Matrix> heads;
    for (int j = 0; j < cfg.heads; ++j) {
      Matrix hw(chunk, chunk);
      detail::glorot_fill(hw, rng, chunk, chunk);
      heads.push_back(std::move(hw));
    }
    p.head_w.push_back(std::move(heads));
    if (f_prev == f) {
      p.skip_w.emplace_back();  // identity skip
    } else {
      Matrix sw(f_prev, f);
      detail::glorot_fill(sw, rng, f_prev, f);
      p.skip_w.push_back(std::move(sw));
    }
    f_prev = f;
  }

  const int pooled = n * f_prev;
  p.fc1_w.resize(cfg.fc_hidden_1, pooled);
  detail::glorot_fill(p.fc1_w, rng, pooled, cfg.fc_hidden_1);
  p.fc1_b = Matrix::Zero(cfg.fc_hidden_1, 1);
  p.fc2_w.resize(cfg.fc_hidden_2, cfg.fc_hidden_1);
  detail::glorot_fill(p.fc2_w, rng, cfg.fc_hidden_1, cfg.fc_hidden_2);
  p.fc2_b = Matrix::Zero(cfg.fc_hidden_2, 1);
  p.out_w.resize(1, cfg.fc_hidden_2);
  detail::glorot_fill(p.out_w, rng, cfg.fc_hidden_2, 1);
  p.out_b = Matrix::Zero(1, 1);

  state.adam_m = detail::zeros_like(p);
  state.adam_v = detail::zeros_like(p);
  return state;
}

// --- Forward / backward --------------------------------------------------------

struct PreparedSample {
  Matrix a_norm;
  Matrix x;
  int label = 0;
};

inline PreparedSample prepare_sample(const CausalGraph& g, int label) {
  return {normalize_adjacency(symmetrized_view(g)), g.features, label};
}

struct ForwardCache {
  std::vector<Matrix> h;        // L + 1 embeddings
  std::vector<Matrix> ah;       // A * H per layer
  std::vector<Matrix> pre;      // A * H * W
  std::vector<Matrix> act;      // activation(pre)
  std::vector<Matrix> head_out; // multi-head output, pre-relu
  std::vector<Matrix> mask;     // dropout masks, empty rows when inactive
  Vector z, z1, a1, z2, a2;
  double logit = 0.0;
  double prob = 0.0;
};

// Double fully connected feature transform with relu between, then a scalar
// logistic readout.
inline double classify_logit(const ParamSet& p, const Vector& z, ForwardCache* cache = nullptr) {
  require(p.fc1_w.cols() == z.size(), Errc::shape_mismatch, "pooled width ", z.size(),
          " does not match classifier input ", p.fc1_w.cols());
  Vector z1 = p.fc1_w * z + p.fc1_b.col(0);
  Vector a1 = z1.cwiseMax(0.0);
  Vector z2 = p.fc2_w * a1 + p.fc2_b.col(0);
  Vector a2 = z2.cwiseMax(0.0);
  const double logit = (p.out_w * a2)(0) + p.out_b(0, 0);
  if (cache) {
    cache->z = z;
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
    cache->logit = logit;
  }
  return logit;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double classify(const ParamSet& p, const Vector& z_pooled) {
  return sigmoid(classify_logit(p, z_pooled));
}

// Numerically stable binary cross-entropy on a logit.
inline double bce_from_logit(double logit, int label) {
  return std::max(logit, 0.0) - logit * label + std::log1p(std::exp(-std::abs(logit)));
}

inline double model_forward(const ModelConfig& cfg, const ParamSet& p,
                            const PreparedSample& sample, bool training, Rng* rng,
                            ForwardCache& cache) {
  const int n = static_cast<int>(sample.x.rows());
  const int layers = static_cast<int>(p.gcn_w.size());
  cache.h.assign(1, sample.x);
  cache.ah.clear();
  cache.pre.clear();
  cache.act.clear();
  cache.head_out.clear();
  cache.mask.clear();

  for (int l = 0; l < layers; ++l) {
    const Matrix& h = cache.h.back();
    require(h.cols() == p.gcn_w[l].rows(), Errc::shape_mismatch, "layer ", l, " expects width ",
            p.gcn_w[l].rows(), ", got ", h.cols());
    Matrix ah = sample.a_norm * h;
    Matrix pre = ah * p.gcn_w[l];
    Matrix act = apply_activation(pre, cfg.layer_activation);

    const int f = static_cast<int>(act.cols());
    const int chunk = f / cfg.heads;
    Matrix head_out(n, f);
    for (int j = 0; j < cfg.heads; ++j)
      head_out.middleCols(j * chunk, chunk) =
          act.middleCols(j * chunk, chunk) * p.head_w[l][j];

    Matrix next = apply_activation(head_out, cfg.skip_activation);
    if (p.skip_w[l].size() > 0)
      next += h * p.skip_w[l];
    else
      next += h;

    if (training && cfg.dropout_rate > 0.0) {
      require(rng != nullptr, Errc::config_error, "training forward needs an RNG for dropout");
      const double keep = 1.0 - cfg.dropout_rate;
      Matrix mask(n, f);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < f; ++c) mask(r, c) = rng->uniform01() < keep ? 1.0 / keep : 0.0;
      next = next.cwiseProduct(mask);
      cache.mask.push_back(std::move(mask));
    } else {
      cache.mask.emplace_back();
    }

    cache.ah.push_back(std::move(ah));
    cache.pre.push_back(std::move(pre));
    cache.act.push_back(std::move(act));
    cache.head_out.push_back(std::move(head_out));
    cache.h.push_back(std::move(next));
  }

  Vector z = concat_pool(cache.h.back());
  const double logit = classify_logit(p, z, &cache);
  cache.prob = sigmoid(logit);
  return cache.prob;
}

// Reverse accumulation mirroring model_forward; gradients accumulate into
// `grads` (same shapes as the parameters).
inline void model_backward(const ModelConfig& cfg, const ParamSet& p,
                           const PreparedSample& sample, const ForwardCache& cache,
                           double dlogit, ParamSet& grads) {
  grads.out_w += dlogit * cache.a2.transpose();
  grads.out_b(0, 0) += dlogit;
  Vector da2 = p.out_w.transpose() * dlogit;
  Vector dz2 = da2.cwiseProduct(
      cache.z2.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  grads.fc2_w += dz2 * cache.a1.transpose();
  grads.fc2_b.col(0) += dz2;
  Vector da1 = p.fc2_w.transpose() * dz2;
  Vector dz1 = da1.cwiseProduct(
      cache.z1.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
  grads.fc1_w += dz1 * cache.z.transpose();
  grads.fc1_b.col(0) += dz1;
  Vector dz = p.fc1_w.transpose() * dz1;

  const int layers = static_cast<int>(p.gcn_w.size());
  const int n = static_cast<int>(sample.x.rows());
  const int f_last = layers > 0 ? static_cast<int>(p.gcn_w.back().cols()) : n;
  Matrix dh(n, f_last);
  for (int i = 0; i < n; ++i) dh.row(i) = dz.segment(i * f_last, f_last);

  for (int l = layers - 1; l >= 0; --l) {
    if (cache.mask[l].size() > 0) dh = dh.cwiseProduct(cache.mask[l]);

    Matrix du = dh.cwiseProduct(activation_gradient(cache.head_out[l], cfg.skip_activation));

    Matrix dh_prev;
    if (p.skip_w[l].size() > 0) {
      grads.skip_w[l] += cache.h[l].transpose() * dh;
      dh_prev = dh * p.skip_w[l].transpose();
    } else {
      dh_prev = dh;
    }

    const int f = static_cast<int>(du.cols());
    const int chunk = f / cfg.heads;
    Matrix dact(n, f);
    for (int j = 0; j < cfg.heads; ++j) {
      grads.head_w[l][j] += cache.act[l].middleCols(j * chunk, chunk).transpose() *
                            du.middleCols(j * chunk, chunk);
      dact.middleCols(j * chunk, chunk) =
          du.middleCols(j * chunk, chunk) * p.head_w[l][j].transpose();
    }

    Matrix dpre;
    switch (cfg.layer_activation) {
      case Activation::sigmoid:
        dpre = dact.cwiseProduct(cache.act[l].cwiseProduct(Matrix::Ones(n, f) - cache.act[l]));
        break;
      case Activation::relu:
        dpre = dact.cwiseProduct(cache.pre[l].unaryExpr(
            [](double v) { return v > 0.0 ? 1.0 : 0.0; }));
        break;
      default:
        dpre = dact;
    }

    grads.gcn_w[l] += cache.ah[l].transpose() * dpre;
    dh = dh_prev + sample.a_norm * (dpre * p.gcn_w[l].transpose());
  }
}

// --- Training -------------------------------------------------------------------

struct TrainOptions {
  double lr = 0.0001;
  int batch_size = 16;
  int max_epochs = 200;
  int patience = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct GraphDataset {
  std::vector<CausalGraph> graphs;
  std::vector<int> labels;
  std::vector<Split> tags;
};

struct CurvePoint {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_f1 = 0.0;
};

struct TrainResult {
  ModelState state;  // snapshot with the best validation F1
  std::vector<CurvePoint> curve;
  int best_epoch = 0;
  double best_val_f1 = 0.0;
};

namespace detail {

inline void adam_step(ModelState& state, ParamSet& grads, const TrainOptions& opt) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
  auto params = named_tensors(state.params);
  auto m = named_tensors(state.adam_m);
  auto v = named_tensors(state.adam_v);
  auto g = named_tensors(grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& pm = *params[i].second;
    Matrix& mm = *m[i].second;
    Matrix& vm = *v[i].second;
    const Matrix& gm = *g[i].second;
    mm = opt.beta1 * mm + (1.0 - opt.beta1) * gm;
    vm = opt.beta2 * vm + (1.0 - opt.beta2) * gm.cwiseProduct(gm);
    const Matrix m_hat = mm / bc1;
    const Matrix v_hat = vm / bc2;
    pm -= opt.lr * m_hat.cwiseQuotient(v_hat.cwiseSqrt() + Matrix::Constant(
                                                               v_hat.rows(), v_hat.cols(), opt.eps));
  }
}

inline bool all_finite(ModelState& state) {
  for (auto& [name, tensor] : named_tensors(state.params))
    if (!tensor->allFinite()) return false;
  return true;
}

}  // namespace detail

inline std::vector<double> predict_probs(const ModelConfig& cfg, const ParamSet& params,
                                         std::span<const PreparedSample> samples) {
  std::vector<double> probs;
  probs.reserve(samples.size());
  ForwardCache cache;
  for (const auto& s : samples)
    probs.push_back(model_forward(cfg, params, s, /*training=*/false, nullptr, cache));
  return probs;
}

inline TrainResult train(const GraphDataset& dataset, const ModelConfig& cfg,
                         const TrainOptions& opt) {
  validate_model_config(cfg);
  require(opt.lr >= 0.0, Errc::config_error, "learning rate must be nonnegative");
  require(opt.batch_size >= 1, Errc::config_error, "batch size must be >= 1");
  require(opt.max_epochs >= 1, Errc::config_error, "max_epochs must be >= 1");
  require(opt.patience >= 1, Errc::config_error, "patience must be >= 1");
  require(dataset.graphs.size() == dataset.labels.size() &&
              dataset.graphs.size() == dataset.tags.size(),
          Errc::bad_dims, "dataset arrays disagree in length");
  require(!dataset.graphs.empty(), Errc::empty_split, "dataset is empty");

  const int n = dataset.graphs.front().n;
  for (const auto& g : dataset.graphs)
    require(g.n == n, Errc::shape_mismatch,
            "mixed node counts in one dataset are not supported (", n, " vs ", g.n, ")");

  std::vector<PreparedSample> prepared;
  prepared.reserve(dataset.graphs.size());
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i)
    prepared.push_back(prepare_sample(dataset.graphs[i], dataset.labels[i]));

  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < dataset.tags.size(); ++i) {
    if (dataset.tags[i] == Split::train) train_idx.push_back(i);
    if (dataset.tags[i] == Split::val) val_idx.push_back(i);
  }
  require(!train_idx.empty(), Errc::empty_split, "train split is empty");
  require(!val_idx.empty(), Errc::empty_split, "validation split is empty");

  ModelState state = init_model(cfg, n);
  Rng rng(derive_seed(cfg.seed, 0x747261696eULL));  // training stream

  TrainResult result;
  result.state = state;
  result.best_val_f1 = -1.0;
  double best_val_loss = std::numeric_limits<double>::infinity();

  ForwardCache cache;
  int stale = 0;
  for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
    rng.shuffle(train_idx);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(opt.batch_size)) {
      const std::size_t end =
          std::min(train_idx.size(), start + static_cast<std::size_t>(opt.batch_size));
      const double batch_n = static_cast<double>(end - start);
      ParamSet grads = detail::zeros_like(state.params);
      for (std::size_t b = start; b < end; ++b) {
        const PreparedSample& s = prepared[train_idx[b]];
        const double prob = model_forward(cfg, state.params, s, /*training=*/true, &rng, cache);
        epoch_loss += bce_from_logit(cache.logit, s.label);
        const double dlogit = (prob - static_cast<double>(s.label)) / batch_n;
        model_backward(cfg, state.params, s, cache, dlogit, grads);
      }
      detail::adam_step(state, grads, opt);
      require(detail::all_finite(state), Errc::diverged_to_nan,
              "non-finite parameter after optimizer step ", state.step);
    }
    const double train_loss = epoch_loss / static_cast<double>(train_idx.size());
    require(std::isfinite(train_loss), Errc::diverged_to_nan,
            "non-finite training loss at epoch ", epoch);

    double val_loss = 0.0;
    std::vector<double> val_probs;
    std::vector<int> val_labels;
    for (std::size_t i : val_idx) {
      const double prob =
          model_forward(cfg, state.params, prepared[i], /*training=*/false, nullptr, cache);
      val_loss += bce_from_logit(cache.logit, prepared[i].label);
      val_probs.push_back(prob);
      val_labels.push_back(prepared[i].label);
    }
    val_loss /= static_cast<double>(val_idx.size());
    const EvalMetrics val_metrics = evaluate_predictions(val_probs, val_labels);
    result.curve.push_back({epoch, train_loss, val_loss, val_metrics.f1});

    // snapshot on strictly better F1, or on equal F1 with lower loss; only a
    // strict F1 improvement resets the early-stopping counter
    if (val_metrics.f1 > result.best_val_f1) {
      result.best_val_f1 = val_metrics.f1;
      best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.state = state;
      stale = 0;
    } else {
      if (val_metrics.f1 == result.best_val_f1 && val_loss < best_val_loss) {
        best_val_loss = val_loss;
        result.best_epoch = epoch;
        result.state = state;
      }
      if (++stale >= opt.patience) break;
    }
  }
  return result;
}

inline EvalMetrics evaluate(const ModelConfig& cfg, const ModelState& state,
                            const GraphDataset& dataset, Split which) {
  std::vector<PreparedSample> samples;
  std::vector<int> labels;
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    if (dataset.tags[i] != which) continue;
    samples.push_back(prepare_sample(dataset.graphs[i], dataset.labels[i]));
    labels.push_back(dataset.labels[i]);
  }
  require(!samples.empty(), Errc::empty_split, "split \"", split_name(which), "\" is empty");
  const auto probs = predict_probs(cfg, state.params, samples);
  return evaluate_predictions(probs, labels);
}

// --- Checkpoints -----------------------------------------------------------------

inline void save_checkpoint(const ModelState& state, const ModelConfig& cfg,
                            const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["schema_version"] = kCheckpointSchemaVersion;
  doc["step"] = state.step;
  doc["input_width"] = state.input_width;
  doc["seed"] = state.seed;
  doc["config"] = {
      {"layer_sizes", cfg.layer_sizes},
      {"heads", cfg.heads},
      {"dropout", cfg.dropout_rate},
      {"fc_hidden_1", cfg.fc_hidden_1},
      {"fc_hidden_2", cfg.fc_hidden_2},
      {"activation", activation_name(cfg.layer_activation)},
      {"skip_activation", activation_name(cfg.skip_activation)},
      {"seed", cfg.seed},
  };
  auto dump_params = [&](const ParamSet& p, const char* key) {
    nlohmann::json section;
    ParamSet& mut = const_cast<ParamSet&>(p);
    for (auto& [name, tensor] : named_tensors(mut)) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < tensor->rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < tensor->cols(); ++j) row.push_back((*tensor)(i, j));
        rows.push_back(std::move(row));
      }
      section[name] = std::move(rows);
    }
    doc[key] = std::move(section);
  };
  dump_params(state.params, "params");
  dump_params(state.adam_m, "adam_m");
  dump_params(state.adam_v, "adam_v");
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write checkpoint to ", path.string());
  out << doc.dump(2) << "\n";
}

inline std::pair<ModelState, ModelConfig> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::missing_file, "cannot open checkpoint ", path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::serialization_error, "checkpoint parse error: ", e.what());
  }
  for (const char* field : {"schema_version", "step", "input_width", "config", "params"})
    require(doc.contains(field), Errc::schema_mismatch, "checkpoint missing field \"", field,
            "\"");
  const int version = doc["schema_version"].get<int>();
  require(version == kCheckpointSchemaVersion, Errc::schema_mismatch, "checkpoint schema ",
          version, " unsupported; this reader handles version ", kCheckpointSchemaVersion);

  ModelConfig cfg;
  const auto& jc = doc["config"];
  cfg.layer_sizes = jc["layer_sizes"].get<std::vector<int>>();
  cfg.heads = jc["heads"].get<int>();
  cfg.dropout_rate = jc["dropout"].get<double>();
  cfg.fc_hidden_1 = jc["fc_hidden_1"].get<int>();
  cfg.fc_hidden_2 = jc["fc_hidden_2"].get<int>();
  cfg.layer_activation = parse_activation(jc["activation"].get<std::string>());
  cfg.skip_activation = parse_activation(jc.value("skip_activation", std::string("relu")));
  cfg.seed = jc["seed"].get<std::uint64_t>();

  ModelState state = init_model(cfg, doc["input_width"].get<int>());
  state.step = doc["step"].get<long>();
  state.seed = doc.value("seed", std::uint64_t{0});
  auto load_params = [&](ParamSet& p, const char* key) {
    if (!doc.contains(key)) return;
    const auto& section = doc[key];
    for (auto& [name, tensor] : named_tensors(p)) {
      require(section.contains(name), Errc::schema_mismatch, "checkpoint missing tensor ", name);
      const auto& rows = section[name];
      require(static_cast<int>(rows.size()) == tensor->rows(), Errc::schema_mismatch,
              "tensor ", name, " row count mismatch");
      for (int i = 0; i < tensor->rows(); ++i) {
        require(static_cast<int>(rows[i].size()) == tensor->cols(), Errc::schema_mismatch,
                "tensor ", name, " column count mismatch");
        for (int j = 0; j < tensor->cols(); ++j) (*tensor)(i, j) = rows[i][j].get<double>();
      }
    }
  };
  load_params(state.params, "params");
  load_params(state.adam_m, "adam_m");
  load_params(state.adam_v, "adam_v");
  return {std::move(state), std::move(cfg)};
}

inline void write_training_curve(const std::vector<CurvePoint>& curve,
                                 const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write training curve to ",
          path.string());
  out << "epoch,train_loss,val_loss,val_f1\n";
  char buf[3][32];
  for (const auto& p : curve) {
    std::snprintf(buf[0], sizeof buf[0], "%.12g", p.train_loss);
    std::snprintf(buf[1], sizeof buf[1], "%.12g", p.val_loss);
    std::snprintf(buf[2], sizeof buf[2], "%.12g", p.val_f1);
    out << p.epoch << ',' << buf[0] << ',' << buf[1] << ',' << buf[2] << "\n";
  }
}

}  // namespace cgb
