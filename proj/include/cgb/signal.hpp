#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgb/error.hpp"
#include "cgb/random.hpp"
#include "cgb/types.hpp"

namespace cgb {

// Multichannel time series: one row per channel, one column per timestep.
struct SignalMatrix {
  std::vector<std::string> channels;
  Matrix values;  // n x t
  std::string sample_id;

  int n() const { return static_cast<int>(values.rows()); }
  int t() const { return static_cast<int>(values.cols()); }
};

inline void validate_signals(const SignalMatrix& s) {
  require(s.n() >= 2, Errc::bad_dims, "signal matrix needs at least 2 channels, got ", s.n());
  require(s.t() >= 4, Errc::too_few_timesteps, "signal matrix needs at least 4 timesteps, got ", s.t());
  require(static_cast<int>(s.channels.size()) == s.n(), Errc::bad_dims,
          "channel name count ", s.channels.size(), " does not match row count ", s.n());
  for (int i = 0; i < s.n(); ++i)
    for (int j = 0; j < s.t(); ++j)
      require(std::isfinite(s.values(i, j)), Errc::non_numeric_cell,
              "non-finite value at row ", i, ", col ", j);
}

enum class Split { none, train, val, test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    default: return "none";
  }
}

struct LabeledSample {
  SignalMatrix signals;
  int label = 0;  // 0 or 1
};

struct LabeledDataset {
  std::vector<LabeledSample> samples;
  std::vector<Split> split_tags;  // Split::none until split_dataset runs

  std::size_t size() const { return samples.size(); }
};

// --- CSV ingestion -----------------------------------------------------------
//
// Format: header "channel,t0,...,t{T-1}", then one row per channel,
// first field the channel id, remaining fields numeric samples.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_cell(const std::string& text, int row, int col) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  bool consumed = end != begin && *end == '\0';
  require(consumed && std::isfinite(v), Errc::non_numeric_cell,
          "cell (row ", row, ", col ", col, ") is not a finite number: \"", text, "\"");
  return v;
}

}  // namespace detail

inline SignalMatrix load_signals(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::missing_file, "cannot open signals file ", path.string());

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::serialization_error,
          "empty signals file ", path.string());
  auto header = detail::split_csv_line(line);
  require(!header.empty() && header[0] == "channel", Errc::serialization_error,
          "signals CSV must start with a \"channel,...\" header: ", path.string());
  const int t = static_cast<int>(header.size()) - 1;
  require(t >= 4, Errc::too_few_timesteps, "signals CSV has ", t, " timesteps, need at least 4");

  SignalMatrix s;
  std::vector<std::vector<double>> rows;
  int row_index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    require(static_cast<int>(fields.size()) == t + 1, Errc::ragged_rows,
            "row ", row_index, " has ", fields.size() - 1, " samples, expected ", t);
    s.channels.push_back(fields[0]);
    std::vector<double> values(t);
    for (int j = 0; j < t; ++j) values[j] = detail::parse_cell(fields[j + 1], row_index, j);
    rows.push_back(std::move(values));
    ++row_index;
  }
  require(row_index >= 2, Errc::bad_dims, "signals CSV has ", row_index, " channels, need at least 2");

  s.values.resize(row_index, t);
  for (int i = 0; i < row_index; ++i)
    for (int j = 0; j < t; ++j) s.values(i, j) = rows[i][j];
  s.sample_id = path.stem().string();
  validate_signals(s);
  return s;
}

inline void save_signals(const SignalMatrix& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write signals file ", path.string());
  out << "channel";
  for (int j = 0; j < s.t(); ++j) out << ",t" << j;
  out << "\n";
  char buf[40];
  for (int i = 0; i < s.n(); ++i) {
    out << s.channels[i];
    for (int j = 0; j < s.t(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values(i, j));
      out << ',' << buf;
    }
    out << "\n";
  }
}

// --- Synthetic generation ----------------------------------------------------

// VAR(1) process with one coupling matrix per class; planted lag-1 coupling is
// what the downstream transfer entropy stage is expected to recover.
struct SynthSpec {
  int n = 8;
  int t = 240;
  int sample_count = 100;                  // split evenly across the two classes
  std::vector<Matrix> coupling_per_class;  // exactly 2 matrices, n x n
  double noise_std = 0.25;
  std::uint64_t seed = 1;
};

inline double spectral_radius(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(solver.eigenvalues()[i]));
  return r;
}

inline constexpr int kVarBurnIn = 100;

inline LabeledDataset generate_synthetic(const SynthSpec& spec) {
  require(spec.n >= 2, Errc::bad_dims, "synthetic spec needs n >= 2");
  require(spec.t >= 4, Errc::bad_dims, "synthetic spec needs t >= 4");
  require(spec.coupling_per_class.size() == 2, Errc::bad_dims,
          "need exactly 2 coupling matrices, got ", spec.coupling_per_class.size());
  require(spec.sample_count >= 2 && spec.sample_count % 2 == 0, Errc::bad_dims,
          "sample_count must be even and >= 2 for balanced labels");
  require(spec.noise_std >= 0.0, Errc::bad_dims, "noise_std must be nonnegative");
  for (std::size_t c = 0; c < 2; ++c) {
    const Matrix& m = spec.coupling_per_class[c];
    require(m.rows() == spec.n && m.cols() == spec.n, Errc::bad_dims,
            "coupling matrix for class ", c, " is not ", spec.n, "x", spec.n);
    double rho = spectral_radius(m);
    require(rho < 1.0, Errc::unstable_coupling,
            "coupling matrix for class ", c, " has spectral radius ", rho, " >= 1");
  }

  Rng rng(spec.seed);
  LabeledDataset ds;
  ds.samples.reserve(spec.sample_count);
  for (int s = 0; s < spec.sample_count; ++s) {
    int label = s % 2;
    const Matrix& c = spec.coupling_per_class[label];
    Vector v = Vector::Zero(spec.n);
    Matrix values(spec.n, spec.t);
    for (int step = 0; step < kVarBurnIn + spec.t; ++step) {
      Vector noise(spec.n);
      for (int i = 0; i < spec.n; ++i) noise(i) = rng.normal(0.0, spec.noise_std);
      v = c * v + noise;
      if (step >= kVarBurnIn) values.col(step - kVarBurnIn) = v;
    }
    SignalMatrix sm;
    sm.values = std::move(values);
    sm.channels.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) sm.channels[i] = "ch" + std::to_string(i);
    char id[32];
    std::snprintf(id, sizeof id, "synth-%04d", s);
    sm.sample_id = id;
    ds.samples.push_back({std::move(sm), label});
  }
  ds.split_tags.assign(ds.samples.size(), Split::none);
  return ds;
}

// --- Splitting ---------------------------------------------------------------

// 80/20 test split, then 85/15 train/val inside the 80%, stratified per label.
inline LabeledDataset split_dataset(LabeledDataset ds, std::uint64_t seed) {
  require(ds.size() >= 10, Errc::too_few_samples, "need at least 10 samples to split, got ", ds.size());
  std::vector<std::size_t> by_label[2];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    int y = ds.samples[i].label;
    require(y == 0 || y == 1, Errc::bad_dims, "label of sample ", i, " is ", y, ", expected 0 or 1");
    by_label[y].push_back(i);
  }
  require(!by_label[0].empty() && !by_label[1].empty(), Errc::single_class_dataset,
          "both labels must be present to split");

  ds.split_tags.assign(ds.size(), Split::none);
  Rng rng(seed);
  for (auto& group : by_label) {
    rng.shuffle(group);
    const auto n = group.size();
    const auto n_test = static_cast<std::size_t>(std::llround(0.20 * static_cast<double>(n)));
    const auto n_val =
        static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(n - n_test)));
    for (std::size_t i = 0; i < n; ++i) {
      Split tag = i < n_test ? Split::test : (i < n_test + n_val ? Split::val : Split::train);
      ds.split_tags[group[i]] = tag;
    }
  }
  return ds;
}

// --- Dataset manifest --------------------------------------------------------
//
// manifest.json: {"seed": N, "samples": [{"signals_path": ..., "label": 0|1}]}
// with signal paths relative to the manifest location.

inline void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir,
                         std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "signals");
  nlohmann::json manifest;
  manifest["seed"] = seed;
  auto& samples = manifest["samples"] = nlohmann::json::array();
  for (const auto& sample : ds.samples) {
    std::string rel = "signals/" + sample.signals.sample_id + ".csv";
    save_signals(sample.signals, dir / rel);
    samples.push_back({{"signals_path", rel}, {"label", sample.label}});
  }
  std::ofstream out(dir / "manifest.json");
  require(out.good(), Errc::serialization_error, "cannot write manifest in ", dir.string());
  out << manifest.dump(2) << "\n";
}

inline std::pair<LabeledDataset, std::uint64_t> load_dataset(
    const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  require(in.good(), Errc::missing_file, "cannot open manifest ", manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::serialization_error, "manifest parse error: ", e.what());
  }
  require(manifest.contains("samples") && manifest["samples"].is_array(), Errc::schema_mismatch,
          "manifest missing \"samples\" array");
  std::uint64_t seed = manifest.value("seed", std::uint64_t{0});
  LabeledDataset ds;
  const auto base = manifest_path.parent_path();
  for (const auto& rec : manifest["samples"]) {
    require(rec.contains("signals_path") && rec.contains("label"), Errc::schema_mismatch,
            "manifest sample record needs signals_path and label");
    int label = rec["label"].get<int>();
    require(label == 0 || label == 1, Errc::schema_mismatch, "manifest label must be 0 or 1");
    auto sm = load_signals(base / rec["signals_path"].get<std::string>());
    ds.samples.push_back({std::move(sm), label});
  }
  ds.split_tags.assign(ds.samples.size(), Split::none);
  return {std::move(ds), seed};
}

// Convenience builders for the planted coupling layouts used by the synthetic
// benchmark: a feed-forward chain 0 -> 1 -> ... -> n-1 and a hub where node 0
// drives every other node.
inline Matrix chain_coupling(int n, double strength, double self) {
  Matrix c = Matrix::Identity(n, n) * self;
  for (int i = 0; i + 1 < n; ++i) c(i + 1, i) = strength;
  return c;
}

inline Matrix hub_coupling(int n, double strength, double self) {
  Matrix c = Matrix::Identity(n, n) * self;
  for (int i = 1; i < n; ++i) c(i, 0) = strength;
  return c;
}

}  // namespace cgb
