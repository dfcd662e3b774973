#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgb/entropy.hpp"
#include "cgb/error.hpp"
#include "cgb/gnn.hpp"
#include "cgb/graph.hpp"
#include "cgb/metrics.hpp"
#include "cgb/rewiring.hpp"
#include "cgb/signal.hpp"

namespace cgb {

namespace fs = std::filesystem;

// --- Configuration --------------------------------------------------------------

struct SynthSection {
  int n = 8;
  int t = 240;
  int sample_count = 100;
  double noise_std = 0.25;
  double coupling = 0.8;
  double self_coupling = 0.5;
  std::string class0_topology = "chain";
  std::string class1_topology = "hub";
};

struct DataSection {
  std::string source = "synthetic";  // or "manifest"
  std::string manifest_path;
};

struct EntropySection {
  int bin_count = 8;
  int history_target = 1;
  int history_source = 1;
};

struct GraphSection {
  double c = 0.1;
};

struct RewiringSection {
  bool enabled = true;
  double tau = 20.0;
  int max_iterations = -1;  // negative: use node count
  std::optional<double> c_plus;
  std::optional<double> c_minus;
  double curvature_floor = 0.0;
};

struct ModelSection {
  std::vector<int> layer_sizes = {16, 8};
  int heads = 2;
  double dropout = 0.5;
  int fc_hidden_1 = 32;
  int fc_hidden_2 = 16;
  std::string activation = "sigmoid";
  std::string skip_activation = "relu";
};

struct TrainSection {
  double lr = 0.002;
  int batch_size = 16;
  int max_epochs = 200;
  int patience = 20;
};

struct AblationSection {
  double corr_threshold = 0.4;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  DataSection data;
  SynthSection synthetic;
  EntropySection entropy;
  GraphSection graph;
  RewiringSection rewiring;
  ModelSection model;
  TrainSection train;
  AblationSection ablation;
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                       const std::string& prefix) {
  require(obj.is_object(), Errc::config_error, "config: \"",
          prefix.empty() ? "(root)" : prefix.substr(0, prefix.size() - 1),
          "\" must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    require(ok, Errc::config_error, "config: unknown key \"", prefix, it.key(), "\"");
  }
}

template <class T>
void read_field(const nlohmann::json& obj, const char* key, T& target,
                const std::string& prefix) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(Errc::config_error, "config: key \"", prefix, key, "\" has the wrong type");
  }
}

inline void read_optional(const nlohmann::json& obj, const char* key,
                          std::optional<double>& target, const std::string& prefix) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    target.reset();
    return;
  }
  try {
    target = obj.at(key).get<double>();
  } catch (const nlohmann::json::exception&) {
    fail(Errc::config_error, "config: key \"", prefix, key, "\" must be a number or null");
  }
}

}  // namespace detail

inline void merge_config_json(PipelineConfig& cfg, const nlohmann::json& doc) {
  detail::check_keys(doc, {"seed", "data", "synthetic", "entropy", "graph", "rewiring", "model",
                           "train", "ablation"},
                     "");
  detail::read_field(doc, "seed", cfg.seed, "");
  if (doc.contains("data")) {
    const auto& j = doc["data"];
    detail::check_keys(j, {"source", "manifest_path"}, "data.");
    detail::read_field(j, "source", cfg.data.source, "data.");
    detail::read_field(j, "manifest_path", cfg.data.manifest_path, "data.");
  }
  if (doc.contains("synthetic")) {
    const auto& j = doc["synthetic"];
    detail::check_keys(j,
                       {"n", "t", "sample_count", "noise_std", "coupling", "self_coupling",
                        "class0_topology", "class1_topology"},
                       "synthetic.");
    detail::read_field(j, "n", cfg.synthetic.n, "synthetic.");
    detail::read_field(j, "t", cfg.synthetic.t, "synthetic.");
    detail::read_field(j, "sample_count", cfg.synthetic.sample_count, "synthetic.");
    detail::read_field(j, "noise_std", cfg.synthetic.noise_std, "synthetic.");
    detail::read_field(j, "coupling", cfg.synthetic.coupling, "synthetic.");
    detail::read_field(j, "self_coupling", cfg.synthetic.self_coupling, "synthetic.");
    detail::read_field(j, "class0_topology", cfg.synthetic.class0_topology, "synthetic.");
    detail::read_field(j, "class1_topology", cfg.synthetic.class1_topology, "synthetic.");
  }
  if (doc.contains("entropy")) {
    const auto& j = doc["entropy"];
    detail::check_keys(j, {"bin_count", "history_target", "history_source"}, "entropy.");
    detail::read_field(j, "bin_count", cfg.entropy.bin_count, "entropy.");
    detail::read_field(j, "history_target", cfg.entropy.history_target, "entropy.");
    detail::read_field(j, "history_source", cfg.entropy.history_source, "entropy.");
  }
  if (doc.contains("graph")) {
    const auto& j = doc["graph"];
    detail::check_keys(j, {"c"}, "graph.");
    detail::read_field(j, "c", cfg.graph.c, "graph.");
  }
  if (doc.contains("rewiring")) {
    const auto& j = doc["rewiring"];
    detail::check_keys(
        j, {"enabled", "tau", "max_iterations", "c_plus", "c_minus", "curvature_floor"},
        "rewiring.");
    detail::read_field(j, "enabled", cfg.rewiring.enabled, "rewiring.");
    detail::read_field(j, "tau", cfg.rewiring.tau, "rewiring.");
    detail::read_field(j, "max_iterations", cfg.rewiring.max_iterations, "rewiring.");
    detail::read_optional(j, "c_plus", cfg.rewiring.c_plus, "rewiring.");
    detail::read_optional(j, "c_minus", cfg.rewiring.c_minus, "rewiring.");
    detail::read_field(j, "curvature_floor", cfg.rewiring.curvature_floor, "rewiring.");
  }
  if (doc.contains("model")) {
    const auto& j = doc["model"];
    detail::check_keys(j,
                       {"layer_sizes", "heads", "dropout", "fc_hidden_1", "fc_hidden_2",
                        "activation", "skip_activation"},
                       "model.");
    detail::read_field(j, "layer_sizes", cfg.model.layer_sizes, "model.");
    detail::read_field(j, "heads", cfg.model.heads, "model.");
    detail::read_field(j, "dropout", cfg.model.dropout, "model.");
    detail::read_field(j, "fc_hidden_1", cfg.model.fc_hidden_1, "model.");
    detail::read_field(j, "fc_hidden_2", cfg.model.fc_hidden_2, "model.");
    detail::read_field(j, "activation", cfg.model.activation, "model.");
    detail::read_field(j, "skip_activation", cfg.model.skip_activation, "model.");
  }
  if (doc.contains("train")) {
    const auto& j = doc["train"];
    detail::check_keys(j, {"lr", "batch_size", "max_epochs", "patience"}, "train.");
    detail::read_field(j, "lr", cfg.train.lr, "train.");
    detail::read_field(j, "batch_size", cfg.train.batch_size, "train.");
    detail::read_field(j, "max_epochs", cfg.train.max_epochs, "train.");
    detail::read_field(j, "patience", cfg.train.patience, "train.");
  }
  if (doc.contains("ablation")) {
    const auto& j = doc["ablation"];
    detail::check_keys(j, {"corr_threshold"}, "ablation.");
    detail::read_field(j, "corr_threshold", cfg.ablation.corr_threshold, "ablation.");
  }
}

inline PipelineConfig load_config(const std::optional<fs::path>& file) {
  PipelineConfig cfg;
  if (file) {
    std::ifstream in(*file);
    require(in.good(), Errc::missing_file, "cannot open config file ", file->string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::config_error, "config parse error: ", e.what());
    }
    merge_config_json(cfg, doc);
  }
  return cfg;
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
  nlohmann::json doc;
  doc["seed"] = cfg.seed;
  doc["data"] = {{"source", cfg.data.source}, {"manifest_path", cfg.data.manifest_path}};
  doc["synthetic"] = {{"n", cfg.synthetic.n},
                      {"t", cfg.synthetic.t},
                      {"sample_count", cfg.synthetic.sample_count},
                      {"noise_std", cfg.synthetic.noise_std},
                      {"coupling", cfg.synthetic.coupling},
                      {"self_coupling", cfg.synthetic.self_coupling},
                      {"class0_topology", cfg.synthetic.class0_topology},
                      {"class1_topology", cfg.synthetic.class1_topology}};
  doc["entropy"] = {{"bin_count", cfg.entropy.bin_count},
                    {"history_target", cfg.entropy.history_target},
                    {"history_source", cfg.entropy.history_source}};
  doc["graph"] = {{"c", cfg.graph.c}};
  doc["rewiring"] = {{"enabled", cfg.rewiring.enabled},
                     {"tau", cfg.rewiring.tau},
                     {"max_iterations", cfg.rewiring.max_iterations},
                     {"c_plus", cfg.rewiring.c_plus ? nlohmann::json(*cfg.rewiring.c_plus)
                                                    : nlohmann::json(nullptr)},
                     {"c_minus", cfg.rewiring.c_minus ? nlohmann::json(*cfg.rewiring.c_minus)
                                                      : nlohmann::json(nullptr)},
                     {"curvature_floor", cfg.rewiring.curvature_floor}};
  doc["model"] = {{"layer_sizes", cfg.model.layer_sizes},
                  {"heads", cfg.model.heads},
                  {"dropout", cfg.model.dropout},
                  {"fc_hidden_1", cfg.model.fc_hidden_1},
                  {"fc_hidden_2", cfg.model.fc_hidden_2},
                  {"activation", cfg.model.activation},
                  {"skip_activation", cfg.model.skip_activation}};
  doc["train"] = {{"lr", cfg.train.lr},
                  {"batch_size", cfg.train.batch_size},
                  {"max_epochs", cfg.train.max_epochs},
                  {"patience", cfg.train.patience}};
  doc["ablation"] = {{"corr_threshold", cfg.ablation.corr_threshold}};
  return doc;
}

inline void validate_config(const PipelineConfig& cfg) {
  require(cfg.data.source == "synthetic" || cfg.data.source == "manifest", Errc::config_error,
          "config: \"data.source\" must be \"synthetic\" or \"manifest\"");
  if (cfg.data.source == "manifest")
    require(!cfg.data.manifest_path.empty(), Errc::config_error,
            "config: \"data.manifest_path\" is required when data.source is \"manifest\"");
  for (const std::string* topo : {&cfg.synthetic.class0_topology, &cfg.synthetic.class1_topology})
    require(*topo == "chain" || *topo == "hub", Errc::config_error,
            "config: synthetic topology must be \"chain\" or \"hub\", got \"", *topo, "\"");
  require(cfg.synthetic.n >= 2, Errc::config_error, "config: \"synthetic.n\" must be >= 2");
  require(cfg.synthetic.t >= 4, Errc::config_error, "config: \"synthetic.t\" must be >= 4");
  require(cfg.synthetic.sample_count >= 10 && cfg.synthetic.sample_count % 2 == 0,
          Errc::config_error, "config: \"synthetic.sample_count\" must be even and >= 10");
  require(cfg.synthetic.noise_std >= 0.0, Errc::config_error,
          "config: \"synthetic.noise_std\" must be >= 0");
  require(cfg.entropy.bin_count >= 2, Errc::config_error,
          "config: \"entropy.bin_count\" must be >= 2");
  require(cfg.entropy.history_target >= 1 && cfg.entropy.history_source >= 1, Errc::config_error,
          "config: entropy history lengths must be >= 1");
  require(cfg.graph.c >= 0.0, Errc::config_error, "config: \"graph.c\" must be >= 0");
  require(cfg.rewiring.tau > 0.0, Errc::config_error, "config: \"rewiring.tau\" must be > 0");
  for (const auto* act : {&cfg.model.activation, &cfg.model.skip_activation})
    require(*act == "sigmoid" || *act == "relu", Errc::config_error,
            "config: model activations must be \"sigmoid\" or \"relu\", got \"", *act, "\"");
  require(cfg.train.lr >= 0.0, Errc::config_error, "config: \"train.lr\" must be >= 0");
  require(cfg.train.batch_size >= 1, Errc::config_error,
          "config: \"train.batch_size\" must be >= 1");
  require(cfg.train.max_epochs >= 1, Errc::config_error,
          "config: \"train.max_epochs\" must be >= 1");
  require(cfg.train.patience >= 1, Errc::config_error, "config: \"train.patience\" must be >= 1");
  require(cfg.ablation.corr_threshold >= 0.0, Errc::config_error,
          "config: \"ablation.corr_threshold\" must be >= 0");

  ModelConfig mc;
  mc.layer_sizes = cfg.model.layer_sizes;
  mc.heads = cfg.model.heads;
  mc.dropout_rate = cfg.model.dropout;
  mc.fc_hidden_1 = cfg.model.fc_hidden_1;
  mc.fc_hidden_2 = cfg.model.fc_hidden_2;
  mc.layer_activation = parse_activation(cfg.model.activation);
  mc.skip_activation = parse_activation(cfg.model.skip_activation);
  validate_model_config(mc);
}

// --- Variants --------------------------------------------------------------------

enum class Variant { full, no_caugraph, no_csdrf, no_gconv };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::no_caugraph: return "no_caugraph";
    case Variant::no_csdrf: return "no_csdrf";
    case Variant::no_gconv: return "no_gconv";
    default: return "full";
  }
}

inline Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "no_caugraph") return Variant::no_caugraph;
  if (name == "no_csdrf") return Variant::no_csdrf;
  if (name == "no_gconv") return Variant::no_gconv;
  fail(Errc::unknown_variant, "unknown ablation variant \"", name,
       "\" (expected full, no_caugraph, no_csdrf, no_gconv)");
}

// |Pearson r| between channel rows, zero diagonal; constant channels get 0.
inline Matrix pearson_abs(const SignalMatrix& s) {
  const int n = s.n();
  const int t = s.t();
  Matrix centered = s.values;
  for (int i = 0; i < n; ++i) centered.row(i).array() -= s.values.row(i).mean();
  Vector norms(n);
  for (int i = 0; i < n; ++i) norms(i) = centered.row(i).norm();
  Matrix r = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || norms(i) == 0.0 || norms(j) == 0.0) continue;
      r(i, j) = std::abs(centered.row(i).dot(centered.row(j)) / (norms(i) * norms(j)));
    }
  (void)t;
  return r;
}

// --- Pipeline --------------------------------------------------------------------

struct StageOptions {
  bool skip_rewire = false;
  bool skip_train = false;
};

struct SweepRow {
  double c = 0.0;
  long edge_count = 0;  // directed edges before rewiring, summed over samples
  double f1 = 0.0;
  bool best = false;
};

struct RunResult {
  fs::path out_dir;
  EvalMetrics test_metrics;
  double best_val_f1 = 0.0;
  int best_epoch = 0;
  long edges_pre_rewire = 0;
  bool trained = false;
};

namespace detail {

inline constexpr std::uint64_t kSeedData = 1;
inline constexpr std::uint64_t kSeedSplit = 2;
inline constexpr std::uint64_t kSeedModel = 3;
inline constexpr std::uint64_t kSeedRewireBase = 1000;

inline void write_status(const fs::path& dir, const std::string& state,
                         const std::string& stage) {
  nlohmann::json doc{{"state", state}, {"stage", stage}};
  std::ofstream out(dir / "status.json");
  out << doc.dump(2) << "\n";
}

template <class F>
auto run_stage(const fs::path& dir, const char* name, F&& fn) {
  write_status(dir, "incomplete", name);
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.code(), "stage ", name, ": ", e.what());
  }
}

inline ModelConfig model_config_for(const PipelineConfig& cfg, Variant variant) {
  ModelConfig mc;
  mc.layer_sizes = variant == Variant::no_gconv ? std::vector<int>{} : cfg.model.layer_sizes;
  mc.heads = cfg.model.heads;
  mc.dropout_rate = cfg.model.dropout;
  mc.fc_hidden_1 = cfg.model.fc_hidden_1;
  mc.fc_hidden_2 = cfg.model.fc_hidden_2;
  mc.layer_activation = parse_activation(cfg.model.activation);
  mc.skip_activation = parse_activation(cfg.model.skip_activation);
  mc.seed = derive_seed(cfg.seed, kSeedModel);
  return mc;
}

}  // namespace detail

inline LabeledDataset build_dataset(const PipelineConfig& cfg) {
  if (cfg.data.source == "manifest") {
    auto [ds, seed] = load_dataset(cfg.data.manifest_path);
    return std::move(ds);
  }
  SynthSpec spec;
  spec.n = cfg.synthetic.n;
  spec.t = cfg.synthetic.t;
  spec.sample_count = cfg.synthetic.sample_count;
  spec.noise_std = cfg.synthetic.noise_std;
  spec.seed = derive_seed(cfg.seed, detail::kSeedData);
  auto build = [&](const std::string& topo) {
    return topo == "hub" ? hub_coupling(spec.n, cfg.synthetic.coupling, cfg.synthetic.self_coupling)
                         : chain_coupling(spec.n, cfg.synthetic.coupling,
                                          cfg.synthetic.self_coupling);
  };
  spec.coupling_per_class = {build(cfg.synthetic.class0_topology),
                             build(cfg.synthetic.class1_topology)};
  return generate_synthetic(spec);
}

inline RunResult run_pipeline(const PipelineConfig& cfg, Variant variant, const fs::path& out_dir,
                              const StageOptions& stages = {}) {
  validate_config(cfg);
  fs::create_directories(out_dir);
  fs::create_directories(out_dir / "te");
  fs::create_directories(out_dir / "graphs");
  fs::create_directories(out_dir / "rewiring");

  {
    std::ofstream out(out_dir / "config.json");
    require(out.good(), Errc::serialization_error, "cannot write config echo");
    nlohmann::json echo = config_to_json(cfg);
    echo["variant"] = variant_name(variant);
    out << echo.dump(2) << "\n";
  }

  RunResult result;
  result.out_dir = out_dir;

  LabeledDataset ds = detail::run_stage(out_dir, "data", [&] { return build_dataset(cfg); });

  ds = detail::run_stage(out_dir, "split", [&] {
    return split_dataset(std::move(ds), derive_seed(cfg.seed, detail::kSeedSplit));
  });
  {
    std::ofstream out(out_dir / "splits.csv");
    out << "sample_id,label,split\n";
    for (std::size_t i = 0; i < ds.size(); ++i)
      out << ds.samples[i].signals.sample_id << ',' << ds.samples[i].label << ','
          << split_name(ds.split_tags[i]) << "\n";
  }

  const bool rewire_active = variant != Variant::no_caugraph && variant != Variant::no_csdrf &&
                             cfg.rewiring.enabled && !stages.skip_rewire;

  GraphDataset graphs = detail::run_stage(out_dir, "graphs", [&] {
    GraphDataset out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const SignalMatrix& signals = ds.samples[i].signals;
      CausalGraph g;
      if (variant == Variant::no_caugraph) {
        TEMatrix weights;  // correlation stands in for the causal weights
        weights.values = pearson_abs(signals);
        weights.bin_count = 0;
        g = build_adjacency(weights, cfg.ablation.corr_threshold);
      } else {
        TEMatrix te = te_matrix(signals, cfg.entropy.bin_count, cfg.entropy.history_target,
                                cfg.entropy.history_source);
        write_te_csv(te, out_dir / "te" / (signals.sample_id + ".csv"));
        g = build_adjacency(te, cfg.graph.c);
      }
      result.edges_pre_rewire += g.edge_count();
      save_graph(g, out_dir / "graphs" / (signals.sample_id + ".pre.json"));

      if (rewire_active && g.edge_count() > 0) {
        RewireConfig rc;
        rc.tau = cfg.rewiring.tau;
        rc.max_iterations = cfg.rewiring.max_iterations;
        rc.c_plus = cfg.rewiring.c_plus;
        rc.c_minus = cfg.rewiring.c_minus;
        rc.curvature_floor = cfg.rewiring.curvature_floor;
        rc.seed = derive_seed(cfg.seed, detail::kSeedRewireBase + i);
        auto [rewired, log] = rewire(g, rc);
        write_rewiring_log(log, out_dir / "rewiring" / (signals.sample_id + ".log"));
        save_graph(rewired, out_dir / "graphs" / (signals.sample_id + ".post.json"));
        g = std::move(rewired);
      }
      out.graphs.push_back(std::move(g));
      out.labels.push_back(ds.samples[i].label);
      out.tags.push_back(ds.split_tags[i]);
    }
    return out;
  });

  if (stages.skip_train) {
    detail::write_status(out_dir, "complete", "graphs");
    return result;
  }

  const ModelConfig mc = detail::model_config_for(cfg, variant);
  TrainOptions opt;
  opt.lr = cfg.train.lr;
  opt.batch_size = cfg.train.batch_size;
  opt.max_epochs = cfg.train.max_epochs;
  opt.patience = cfg.train.patience;

  TrainResult trained = detail::run_stage(out_dir, "train", [&] { return train(graphs, mc, opt); });
  write_training_curve(trained.curve, out_dir / "training_curve.csv");
  save_checkpoint(trained.state, mc, out_dir / "checkpoint.json");

  result.test_metrics = detail::run_stage(out_dir, "evaluate", [&] {
    return evaluate(mc, trained.state, graphs, Split::test);
  });
  result.best_val_f1 = trained.best_val_f1;
  result.best_epoch = trained.best_epoch;
  result.trained = true;

  {
    nlohmann::json doc;
    doc["variant"] = variant_name(variant);
    doc["seed"] = cfg.seed;
    doc["threshold"] = 0.5;
    doc["confusion"] = {{"tp", result.test_metrics.confusion.tp},
                        {"fp", result.test_metrics.confusion.fp},
                        {"tn", result.test_metrics.confusion.tn},
                        {"fn", result.test_metrics.confusion.fn}};
    doc["f1"] = result.test_metrics.f1;
    doc["sensitivity"] = result.test_metrics.sensitivity;
    doc["specificity"] = result.test_metrics.specificity;
    if (result.test_metrics.auc)
      doc["auc"] = *result.test_metrics.auc;
    else
      doc["auc"] = nullptr;
    doc["best_val_f1"] = result.best_val_f1;
    doc["best_epoch"] = result.best_epoch;
    std::ofstream out(out_dir / "metrics.json");
    require(out.good(), Errc::serialization_error, "cannot write metrics report");
    out << doc.dump(2) << "\n";
  }
  detail::write_status(out_dir, "complete", "done");
  return result;
}

inline std::vector<SweepRow> cmd_sweep_c(const PipelineConfig& cfg,
                                         const std::vector<double>& values,
                                         const fs::path& out_dir) {
  require(!values.empty(), Errc::empty_sweep, "sweep needs at least one threshold value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] > 0.0, Errc::config_error, "sweep values must be positive, got ",
            values[i]);
    require(i == 0 || values[i] > values[i - 1], Errc::config_error,
            "sweep values must be strictly ascending");
  }
  validate_config(cfg);
  fs::create_directories(out_dir);

  std::vector<SweepRow> rows;
  for (double c : values) {
    PipelineConfig sub = cfg;
    sub.graph.c = c;
    char name[32];
    std::snprintf(name, sizeof name, "c_%g", c);
    RunResult r = run_pipeline(sub, Variant::full, out_dir / name);
    rows.push_back({c, r.edges_pre_rewire, r.test_metrics.f1, false});
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].f1 > rows[best].f1) best = i;
  rows[best].best = true;

  std::ofstream out(out_dir / "sweep.csv");
  require(out.good(), Errc::serialization_error, "cannot write sweep table");
  out << "c,edge_count,f1,best\n";
  char buf[2][32];
  for (const auto& row : rows) {
    std::snprintf(buf[0], sizeof buf[0], "%.12g", row.c);
    std::snprintf(buf[1], sizeof buf[1], "%.12g", row.f1);
    out << buf[0] << ',' << row.edge_count << ',' << buf[1] << ',' << (row.best ? 1 : 0) << "\n";
  }
  return rows;
}

enum class ExportKind { edges_topk, te_heatmap, curvature_report, rewiring_log };

inline ExportKind parse_export_kind(const std::string& name) {
  if (name == "edges_topk") return ExportKind::edges_topk;
  if (name == "te_heatmap") return ExportKind::te_heatmap;
  if (name == "curvature_report") return ExportKind::curvature_report;
  if (name == "rewiring_log") return ExportKind::rewiring_log;
  fail(Errc::unknown_variant, "unknown export kind \"", name,
       "\" (expected edges_topk, te_heatmap, curvature_report, rewiring_log)");
}

inline void cmd_export(ExportKind kind, const fs::path& artifact, const fs::path& out_file,
                       double fraction = 0.01) {
  require(fs::exists(artifact), Errc::missing_artifact, "artifact not found: ",
          artifact.string());
  switch (kind) {
    case ExportKind::edges_topk: {
      const CausalGraph g = load_graph(artifact);
      write_edge_csv(top_fraction_edges(g, fraction), out_file);
      break;
    }
    case ExportKind::te_heatmap: {
      const CausalGraph g = load_graph(artifact);
      TEMatrix te;
      te.values = g.te;
      write_te_csv(te, out_file);
      break;
    }
    case ExportKind::curvature_report: {
      const CausalGraph g = load_graph(artifact);
      write_curvature_csv(curvature_report(symmetrized_view(g)), out_file);
      break;
    }
    case ExportKind::rewiring_log: {
      std::ifstream in(artifact);
      require(in.good(), Errc::missing_artifact, "cannot open rewiring log ", artifact.string());
      std::ofstream out(out_file);
      require(out.good(), Errc::serialization_error, "cannot write ", out_file.string());
      out << in.rdbuf();
      break;
    }
  }
}

inline void cmd_gen_data(const PipelineConfig& cfg, const fs::path& out_dir) {
  validate_config(cfg);
  PipelineConfig synth = cfg;
  synth.data.source = "synthetic";
  const std::uint64_t seed = derive_seed(cfg.seed, detail::kSeedData);
  LabeledDataset ds = build_dataset(synth);
  save_dataset(ds, out_dir, seed);
}

}  // namespace cgb
