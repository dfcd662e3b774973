#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <vector>

#include "cgb/gnn.hpp"
#include "cgb/graph.hpp"
#include "cgb/random.hpp"

using namespace cgb;
namespace fs = std::filesystem;

namespace {

bool throws_with(Errc code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

CausalGraph random_graph(Rng& rng, int n, double threshold) {
  TEMatrix te;
  te.values = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) te.values(i, j) = rng.uniform01();
  return build_adjacency(te, threshold);
}

GraphDataset tiny_dataset(Rng& rng, int samples, int n) {
  GraphDataset ds;
  for (int i = 0; i < samples; ++i) {
    ds.graphs.push_back(random_graph(rng, n, 0.5));
    ds.labels.push_back(i % 2);
    ds.tags.push_back(Split::train);
  }
  return ds;
}

double batch_loss(const ModelConfig& cfg, const ParamSet& params,
                  const std::vector<PreparedSample>& batch, bool training,
                  std::uint64_t mask_seed) {
  double loss = 0.0;
  ForwardCache cache;
  Rng rng(mask_seed);
  for (const auto& s : batch) {
    model_forward(cfg, params, s, training, training ? &rng : nullptr, cache);
    loss += bce_from_logit(cache.logit, s.label);
  }
  return loss / static_cast<double>(batch.size());
}

// central finite differences against the analytic gradient, per tensor
void gradcheck(const ModelConfig& cfg, ModelState& state, std::vector<PreparedSample>& batch,
               bool training, std::uint64_t mask_seed, double tolerance) {
  ParamSet grads = cgb::detail::zeros_like(state.params);
  {
    ForwardCache cache;
    Rng rng(mask_seed);
    for (const auto& s : batch) {
      const double prob =
          model_forward(cfg, state.params, s, training, training ? &rng : nullptr, cache);
      const double dlogit =
          (prob - static_cast<double>(s.label)) / static_cast<double>(batch.size());
      model_backward(cfg, state.params, s, cache, dlogit, grads);
    }
  }
  auto tensors = named_tensors(state.params);
  auto grad_tensors = named_tensors(grads);
  const double step = 1e-5;
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    Matrix& param = *tensors[t].second;
    const Matrix& analytic = *grad_tensors[t].second;
    Matrix fd(param.rows(), param.cols());
    for (int i = 0; i < param.rows(); ++i) {
      for (int j = 0; j < param.cols(); ++j) {
        const double saved = param(i, j);
        param(i, j) = saved + step;
        const double up = batch_loss(cfg, state.params, batch, training, mask_seed);
        param(i, j) = saved - step;
        const double down = batch_loss(cfg, state.params, batch, training, mask_seed);
        param(i, j) = saved;
        fd(i, j) = (up - down) / (2.0 * step);
      }
    }
    const double denom = std::max({analytic.norm(), fd.norm(), 1e-10});
    const double rel = (analytic - fd).norm() / denom;
    INFO("tensor " << tensors[t].first << " relative error " << rel);
    REQUIRE(rel <= tolerance);
  }
}

}  // namespace

TEST_CASE("normalize_adjacency handles the pinned cases") {
  REQUIRE(normalize_adjacency(IntMatrix::Zero(1, 1)) == Matrix::Ones(1, 1));

  IntMatrix pair(2, 2);
  pair << 0, 1, 1, 0;
  Matrix a = normalize_adjacency(pair);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) REQUIRE(a(i, j) == 0.5);

  IntMatrix with_isolated = IntMatrix::Zero(3, 3);
  with_isolated(0, 1) = with_isolated(1, 0) = 1;
  Matrix b = normalize_adjacency(with_isolated);
  REQUIRE(b(2, 2) == 1.0);
  REQUIRE(b(2, 0) == 0.0);
  REQUIRE(b(2, 1) == 0.0);
  REQUIRE(b == b.transpose().eval());
  for (int i = 0; i < 3; ++i) REQUIRE(b.row(i).sum() <= 1.0 + 1e-12);
}

TEST_CASE("normalize_adjacency rejects asymmetric input") {
  IntMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  REQUIRE(throws_with(Errc::asymmetric_input, [&] { normalize_adjacency(bad); }));
  IntMatrix diag = IntMatrix::Zero(2, 2);
  diag(0, 0) = 1;
  REQUIRE(throws_with(Errc::asymmetric_input, [&] { normalize_adjacency(diag); }));
}

TEST_CASE("gcn_layer behaves on identity and zero weights") {
  Rng rng(5);
  Matrix h(3, 3);
  for (int i = 0; i < 9; ++i) h(i / 3, i % 3) = rng.normal();
  Matrix eye = Matrix::Identity(3, 3);
  REQUIRE(gcn_layer(h, eye, eye, Activation::linear) == h);

  Matrix zero_theta = Matrix::Zero(3, 4);
  Matrix out = gcn_layer(h, eye, zero_theta, Activation::sigmoid);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) REQUIRE(out(i, j) == 0.5);
}

TEST_CASE("gcn_layer matches a naive triple loop") {
  Rng rng(6);
  const int n = 4, f_in = 3, f_out = 2;
  Matrix h(n, f_in), theta(f_in, f_out);
  IntMatrix s = IntMatrix::Zero(n, n);
  s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = s(2, 3) = s(3, 2) = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < f_in; ++j) h(i, j) = rng.normal();
  for (int i = 0; i < f_in; ++i)
    for (int j = 0; j < f_out; ++j) theta(i, j) = rng.normal();
  Matrix a = normalize_adjacency(s);
  Matrix lib = gcn_layer(h, a, theta, Activation::sigmoid);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < f_out; ++o) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < f_in; ++m) acc += a(i, k) * h(k, m) * theta(m, o);
      REQUIRE(lib(i, o) == Catch::Approx(1.0 / (1.0 + std::exp(-acc))).margin(1e-12));
    }
  }
}

TEST_CASE("multi-head transform splits, projects, concatenates") {
  Vector h(4);
  h << 1, 2, 3, 4;
  std::vector<Matrix> identity{Matrix::Identity(4, 4)};
  REQUIRE(multi_head_transform(h, identity) == h);

  std::vector<Matrix> doubled{2 * Matrix::Identity(2, 2), 2 * Matrix::Identity(2, 2)};
  REQUIRE(multi_head_transform(h, doubled) == (2 * h).eval());

  Rng rng(9);
  std::vector<Matrix> heads(2, Matrix(2, 2));
  for (auto& m : heads)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = rng.normal();
  // block-diagonal oracle in the row convention
  Matrix block = Matrix::Zero(4, 4);
  block.block(0, 0, 2, 2) = heads[0];
  block.block(2, 2, 2, 2) = heads[1];
  Vector expected = (h.transpose() * block).transpose();
  Vector got = multi_head_transform(h, heads);
  REQUIRE((got - expected).cwiseAbs().maxCoeff() < 1e-14);

  Vector bad(3);
  bad << 1, 2, 3;
  REQUIRE(throws_with(Errc::indivisible_width, [&] { multi_head_transform(bad, heads); }));
}

TEST_CASE("skip connection applies relu and the optional projection") {
  Vector h_new(3), h_prev(3);
  h_new << -1, -2, -3;
  h_prev << 5, 6, 7;
  REQUIRE(skip_connect(h_new, h_prev, nullptr) == h_prev);

  Vector pos(3);
  pos << 1, 2, 3;
  REQUIRE(skip_connect(pos, h_prev, nullptr) == (pos + h_prev).eval());

  Rng rng(10);
  Vector wide(8), narrow_new(4);
  for (int i = 0; i < 8; ++i) wide(i) = rng.normal();
  for (int i = 0; i < 4; ++i) narrow_new(i) = rng.normal();
  Matrix proj(8, 4);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j) proj(i, j) = rng.normal();
  Vector out = skip_connect(narrow_new, wide, &proj);
  REQUIRE(out.size() == 4);
  Vector expected = narrow_new.cwiseMax(0.0) + proj.transpose() * wide;
  REQUIRE((out - expected).cwiseAbs().maxCoeff() < 1e-14);

  REQUIRE(throws_with(Errc::width_mismatch_without_projection,
                      [&] { skip_connect(narrow_new, wide, nullptr); }));
}

TEST_CASE("concat pooling preserves node order") {
  Matrix z(3, 2);
  z << 1, 2, 3, 4, 5, 6;
  Vector pooled = concat_pool(z);
  REQUIRE(pooled.size() == 6);
  Vector expected(6);
  expected << 1, 2, 3, 4, 5, 6;
  REQUIRE(pooled == expected);

  Matrix single(1, 4);
  single << 7, 8, 9, 10;
  REQUIRE(concat_pool(single) == single.row(0).transpose().eval());

  // permuting nodes permutes blocks: pooling is order-sensitive on purpose
  Matrix swapped(3, 2);
  swapped << 3, 4, 1, 2, 5, 6;
  Vector pooled_swapped = concat_pool(swapped);
  REQUIRE(pooled_swapped.segment(0, 2) == pooled.segment(2, 2));
  REQUIRE(pooled_swapped.segment(2, 2) == pooled.segment(0, 2));
  REQUIRE(pooled_swapped != pooled);
}

TEST_CASE("classifier head on pinned weights") {
  ModelConfig cfg;
  cfg.layer_sizes = {};
  cfg.fc_hidden_1 = 3;
  cfg.fc_hidden_2 = 2;
  cfg.dropout_rate = 0.0;
  cfg.seed = 8;
  ModelState zeroed = init_model(cfg, 2);
  for (auto& [name, tensor] : named_tensors(zeroed.params)) tensor->setZero();
  Vector z(4);
  z << 0.3, -0.4, 0.8, 0.1;
  REQUIRE(classify(zeroed.params, z) == 0.5);

  zeroed.params.out_b(0, 0) = 50.0;
  REQUIRE(classify(zeroed.params, z) > 0.999999);

  ModelState state = init_model(cfg, 2);
  // straight-line reimplementation
  Vector z1 = state.params.fc1_w * z + state.params.fc1_b.col(0);
  Vector a1 = z1.cwiseMax(0.0);
  Vector z2 = state.params.fc2_w * a1 + state.params.fc2_b.col(0);
  Vector a2 = z2.cwiseMax(0.0);
  double logit = (state.params.out_w * a2)(0) + state.params.out_b(0, 0);
  REQUIRE(classify(state.params, z) ==
          Catch::Approx(1.0 / (1.0 + std::exp(-logit))).margin(1e-12));
}

TEST_CASE("model forward equals the composed public building blocks") {
  Rng rng(77);
  auto g = random_graph(rng, 5, 0.4);
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.0;
  cfg.fc_hidden_1 = 6;
  cfg.fc_hidden_2 = 3;
  cfg.seed = 3;
  ModelState state = init_model(cfg, 5);

  PreparedSample sample = prepare_sample(g, 1);
  ForwardCache cache;
  const double prob = model_forward(cfg, state.params, sample, false, nullptr, cache);

  Matrix m = gcn_layer(sample.x, sample.a_norm, state.params.gcn_w[0], cfg.layer_activation);
  Matrix h1(5, 4);
  for (int i = 0; i < 5; ++i) {
    Vector u = multi_head_transform(m.row(i).transpose(), state.params.head_w[0]);
    Vector prev = sample.x.row(i).transpose();
    const Matrix* proj = state.params.skip_w[0].size() > 0 ? &state.params.skip_w[0] : nullptr;
    h1.row(i) = skip_connect(u, prev, proj).transpose();
  }
  const double composed = classify(state.params, concat_pool(h1));
  REQUIRE(prob == Catch::Approx(composed).margin(1e-12));
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(2029);
  ModelConfig cfg;
  cfg.layer_sizes = {8, 4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.0;
  cfg.fc_hidden_1 = 8;
  cfg.fc_hidden_2 = 4;
  cfg.layer_activation = Activation::sigmoid;
  cfg.seed = 424242;
  const int n = 6;
  ModelState state = init_model(cfg, n);

  std::vector<PreparedSample> batch;
  batch.push_back(prepare_sample(random_graph(rng, n, 0.4), 1));
  batch.push_back(prepare_sample(random_graph(rng, n, 0.4), 0));

  // keep relu kinks away from the finite-difference step
  ForwardCache cache;
  for (const auto& s : batch) {
    model_forward(cfg, state.params, s, false, nullptr, cache);
    for (const auto& u : cache.head_out)
      REQUIRE(u.cwiseAbs().minCoeff() > 1e-3);
    REQUIRE(cache.z1.cwiseAbs().minCoeff() > 1e-3);
    REQUIRE(cache.z2.cwiseAbs().minCoeff() > 1e-3);
  }

  gradcheck(cfg, state, batch, /*training=*/false, 0, 1e-4);
}

TEST_CASE("gradients stay correct with a frozen dropout mask") {
  Rng rng(606);
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.3;
  cfg.fc_hidden_1 = 4;
  cfg.fc_hidden_2 = 3;
  cfg.seed = 11;
  const int n = 4;
  ModelState state = init_model(cfg, n);
  // zero-initialized biases park the relu inputs exactly on the kink; nudge
  // them so the finite-difference step stays on one side
  state.params.fc1_b.setConstant(0.21);
  state.params.fc2_b.setConstant(0.17);
  std::vector<PreparedSample> batch;
  batch.push_back(prepare_sample(random_graph(rng, n, 0.5), 1));

  const std::uint64_t mask_seed = 999;
  ForwardCache cache;
  Rng mask_rng(mask_seed);
  model_forward(cfg, state.params, batch[0], true, &mask_rng, cache);
  for (const auto& u : cache.head_out) {
    for (int i = 0; i < u.size(); ++i)
      if (u(i / u.cols(), i % u.cols()) != 0.0)
        REQUIRE(std::abs(u(i / u.cols(), i % u.cols())) > 1e-3);
  }
  REQUIRE(cache.z1.cwiseAbs().minCoeff() > 1e-3);
  REQUIRE(cache.z2.cwiseAbs().minCoeff() > 1e-3);

  gradcheck(cfg, state, batch, /*training=*/true, mask_seed, 2e-4);
}

TEST_CASE("skip activation is configurable") {
  Rng rng(505);
  auto g = random_graph(rng, 4, 0.4);
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.0;
  cfg.fc_hidden_1 = 4;
  cfg.fc_hidden_2 = 3;
  cfg.skip_activation = Activation::sigmoid;
  cfg.seed = 6;
  ModelState state = init_model(cfg, 4);
  PreparedSample sample = prepare_sample(g, 0);
  ForwardCache cache;
  const double prob = model_forward(cfg, state.params, sample, false, nullptr, cache);

  Matrix m = gcn_layer(sample.x, sample.a_norm, state.params.gcn_w[0], cfg.layer_activation);
  Matrix h1(4, 4);
  for (int i = 0; i < 4; ++i) {
    Vector u = multi_head_transform(m.row(i).transpose(), state.params.head_w[0]);
    Vector prev = sample.x.row(i).transpose();
    const Matrix* proj = state.params.skip_w[0].size() > 0 ? &state.params.skip_w[0] : nullptr;
    h1.row(i) = skip_connect(u, prev, proj, Activation::sigmoid).transpose();
  }
  REQUIRE(prob == Catch::Approx(classify(state.params, concat_pool(h1))).margin(1e-12));

  // sigmoid skip has no kinks, so the gradient check needs no margin guard
  std::vector<PreparedSample> batch{sample};
  gradcheck(cfg, state, batch, false, 0, 1e-4);
}

TEST_CASE("training memorizes a single sample") {
  Rng rng(1);
  GraphDataset ds;
  ds.graphs.push_back(random_graph(rng, 4, 0.4));
  ds.graphs.push_back(ds.graphs[0]);
  ds.labels = {1, 1};
  ds.tags = {Split::train, Split::val};

  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.0;
  cfg.fc_hidden_1 = 4;
  cfg.fc_hidden_2 = 3;
  cfg.seed = 2;
  TrainOptions opt;
  opt.lr = 0.05;
  opt.batch_size = 1;
  opt.max_epochs = 200;
  opt.patience = 200;
  auto result = train(ds, cfg, opt);
  REQUIRE(result.curve.size() == 200);
  REQUIRE(result.curve.back().train_loss < 0.01);
  REQUIRE(result.curve.back().train_loss < result.curve.front().train_loss);
}

TEST_CASE("zero learning rate leaves the weights at initialization") {
  Rng rng(2);
  auto ds = tiny_dataset(rng, 12, 4);
  ds.tags[10] = Split::val;
  ds.tags[11] = Split::val;
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 1;
  cfg.dropout_rate = 0.5;
  cfg.fc_hidden_1 = 4;
  cfg.fc_hidden_2 = 2;
  cfg.seed = 31;
  TrainOptions opt;
  opt.lr = 0.0;
  opt.max_epochs = 5;
  auto result = train(ds, cfg, opt);
  ModelState fresh = init_model(cfg, 4);
  auto after = named_tensors(result.state.params);
  auto init = named_tensors(fresh.params);
  for (std::size_t i = 0; i < after.size(); ++i) REQUIRE(*after[i].second == *init[i].second);
}

TEST_CASE("training is deterministic given the seed") {
  Rng rng(3);
  auto ds = tiny_dataset(rng, 14, 4);
  ds.tags[12] = Split::val;
  ds.tags[13] = Split::val;
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.5;
  cfg.fc_hidden_1 = 4;
  cfg.fc_hidden_2 = 2;
  cfg.seed = 77;
  TrainOptions opt;
  opt.lr = 0.01;
  opt.max_epochs = 8;
  auto a = train(ds, cfg, opt);
  auto b = train(ds, cfg, opt);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    REQUIRE(a.curve[i].train_loss == b.curve[i].train_loss);
    REQUIRE(a.curve[i].val_loss == b.curve[i].val_loss);
    REQUIRE(a.curve[i].val_f1 == b.curve[i].val_f1);
  }
  auto ta = named_tensors(a.state.params);
  auto tb = named_tensors(b.state.params);
  for (std::size_t i = 0; i < ta.size(); ++i) REQUIRE(*ta[i].second == *tb[i].second);
}

TEST_CASE("mixed node counts are rejected") {
  Rng rng(4);
  GraphDataset ds;
  ds.graphs.push_back(random_graph(rng, 4, 0.5));
  ds.graphs.push_back(random_graph(rng, 5, 0.5));
  ds.labels = {0, 1};
  ds.tags = {Split::train, Split::val};
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 1;
  REQUIRE(throws_with(Errc::shape_mismatch, [&] { train(ds, cfg, TrainOptions{}); }));
}

TEST_CASE("empty splits are rejected") {
  Rng rng(5);
  auto ds = tiny_dataset(rng, 4, 4);  // all tagged train, no val
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 1;
  cfg.seed = 1;
  REQUIRE(throws_with(Errc::empty_split, [&] { train(ds, cfg, TrainOptions{}); }));
  REQUIRE(throws_with(Errc::empty_split, [&] {
    ModelState state = init_model(cfg, 4);
    evaluate(cfg, state, ds, Split::test);
  }));
}

TEST_CASE("evaluate is a pure function of model and data") {
  Rng rng(6);
  auto ds = tiny_dataset(rng, 10, 4);
  for (int i = 0; i < 4; ++i) ds.tags[i] = Split::test;
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.5;  // must not fire in eval mode
  cfg.seed = 13;
  ModelState state = init_model(cfg, 4);
  auto a = evaluate(cfg, state, ds, Split::test);
  auto b = evaluate(cfg, state, ds, Split::test);
  REQUIRE(a.f1 == b.f1);
  REQUIRE(a.confusion.tp == b.confusion.tp);
  REQUIRE(a.auc == b.auc);
}

TEST_CASE("dropout fires only in training mode and reproduces under a seed") {
  Rng rng(7);
  auto g = random_graph(rng, 4, 0.4);
  ModelConfig cfg;
  cfg.layer_sizes = {4};
  cfg.heads = 2;
  cfg.dropout_rate = 0.5;
  cfg.seed = 5;
  ModelState state = init_model(cfg, 4);
  PreparedSample sample = prepare_sample(g, 1);
  ForwardCache cache;

  const double eval_1 = model_forward(cfg, state.params, sample, false, nullptr, cache);
  const double eval_2 = model_forward(cfg, state.params, sample, false, nullptr, cache);
  REQUIRE(eval_1 == eval_2);

  Rng mask_a(99), mask_b(99), mask_c(100);
  const double train_a = model_forward(cfg, state.params, sample, true, &mask_a, cache);
  const double train_b = model_forward(cfg, state.params, sample, true, &mask_b, cache);
  const double train_c = model_forward(cfg, state.params, sample, true, &mask_c, cache);
  REQUIRE(train_a == train_b);
  REQUIRE(train_a != train_c);  // different mask stream
}

TEST_CASE("checkpoints round-trip the full model state") {
  Rng rng(8);
  auto ds = tiny_dataset(rng, 12, 4);
  ds.tags[10] = Split::val;
  ds.tags[11] = Split::val;
  ModelConfig cfg;
  cfg.layer_sizes = {6, 2};
  cfg.heads = 2;
  cfg.dropout_rate = 0.2;
  cfg.fc_hidden_1 = 5;
  cfg.fc_hidden_2 = 3;
  cfg.seed = 21;
  TrainOptions opt;
  opt.lr = 0.01;
  opt.max_epochs = 4;
  auto result = train(ds, cfg, opt);

  auto path = fs::temp_directory_path() / "cgb_checkpoint.json";
  save_checkpoint(result.state, cfg, path);
  auto [loaded, loaded_cfg] = load_checkpoint(path);
  REQUIRE(loaded.step == result.state.step);
  REQUIRE(loaded_cfg.layer_sizes == cfg.layer_sizes);

  auto ta = named_tensors(result.state.params);
  auto tb = named_tensors(loaded.params);
  REQUIRE(ta.size() == tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) REQUIRE(*ta[i].second == *tb[i].second);

  PreparedSample sample = prepare_sample(ds.graphs[0], ds.labels[0]);
  ForwardCache cache;
  REQUIRE(model_forward(cfg, result.state.params, sample, false, nullptr, cache) ==
          model_forward(loaded_cfg, loaded.params, sample, false, nullptr, cache));
  fs::remove(path);
}

TEST_CASE("model config validation catches bad shapes") {
  ModelConfig bad;
  bad.layer_sizes = {8, 4};
  bad.heads = 3;  // 8 % 3 != 0
  REQUIRE(throws_with(Errc::indivisible_width, [&] { validate_model_config(bad); }));
  bad.heads = 2;
  bad.layer_sizes = {4, 8};  // not a pyramid
  REQUIRE(throws_with(Errc::config_error, [&] { validate_model_config(bad); }));
}
