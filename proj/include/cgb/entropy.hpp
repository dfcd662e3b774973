#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <map>
#include <vector>

#include "cgb/error.hpp"
#include "cgb/signal.hpp"
#include "cgb/types.hpp"

namespace cgb {

// Histogram plug-in estimators, log base 2 throughout.

struct BinnedSeries {
  std::vector<int> codes;         // values in {0..bin_count-1}
  int bin_count = 0;
  std::vector<double> bin_edges;  // bin_count + 1, strictly ascending
};

// Equal-width bins over [min, max]; the maximum lands in the top bin. A
// constant series gets a degenerate range widened by 1e-9 so every code is 0.
inline BinnedSeries bin_series(std::span<const double> series, int bin_count) {
  require(bin_count >= 2, Errc::bad_bin_count, "bin count must be >= 2, got ", bin_count);
  require(series.size() >= 2, Errc::series_too_short, "need at least 2 samples to bin");

  double lo = series[0], hi = series[0];
  for (double v : series) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1e-9;

  BinnedSeries out;
  out.bin_count = bin_count;
  out.bin_edges.resize(bin_count + 1);
  const double width = (hi - lo) / bin_count;
  for (int k = 0; k <= bin_count; ++k) out.bin_edges[k] = lo + width * k;
  out.bin_edges[bin_count] = hi;  // guard against rounding past the max

  out.codes.reserve(series.size());
  for (double v : series) {
    // left-closed bins [e_k, e_{k+1}), right-closed top bin
    auto it = std::upper_bound(out.bin_edges.begin() + 1, out.bin_edges.end() - 1, v);
    out.codes.push_back(static_cast<int>(it - out.bin_edges.begin()) - 1);
  }
  return out;
}

namespace detail {

inline double entropy_from_counts(const std::map<std::uint64_t, int>& counts,
                                  double total) {
  // H = log2(N) - (1/N) * sum c*log2(c); empty cells contribute nothing.
  // Ordered keys fix the summation order, so entropies of histograms related
  // by a cell bijection cancel exactly (a deterministic next step gives TE 0).
  double acc = 0.0;
  for (const auto& [key, c] : counts)
    acc += static_cast<double>(c) * std::log2(static_cast<double>(c));
  return std::log2(total) - acc / total;
}

}  // namespace detail

// Entropy of an explicit probability vector (must sum to 1 within 1e-12).
inline double shannon_entropy(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    require(p >= 0.0, Errc::unnormalized_distribution, "negative probability ", p);
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, Errc::unnormalized_distribution,
          "probabilities sum to ", sum, ", expected 1");
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// Entropy of the empirical distribution of a code sequence.
inline double code_entropy(std::span<const int> codes) {
  require(!codes.empty(), Errc::series_too_short, "empty code sequence");
  std::map<std::uint64_t, int> counts;
  for (int c : codes) ++counts[static_cast<std::uint64_t>(c)];
  return detail::entropy_from_counts(counts, static_cast<double>(codes.size()));
}

inline double joint_entropy(std::span<const int> a, std::span<const int> b) {
  require(a.size() == b.size(), Errc::length_mismatch, "joint entropy needs aligned sequences (",
          a.size(), " vs ", b.size(), ")");
  require(!a.empty(), Errc::series_too_short, "empty code sequences");
  std::uint64_t radix = 1;
  for (int c : b) radix = std::max(radix, static_cast<std::uint64_t>(c) + 1);
  std::map<std::uint64_t, int> counts;
  for (std::size_t i = 0; i < a.size(); ++i)
    ++counts[static_cast<std::uint64_t>(a[i]) * radix + static_cast<std::uint64_t>(b[i])];
  return detail::entropy_from_counts(counts, static_cast<double>(a.size()));
}

// H(target | given) via the chain rule H(T,G) - H(G).
inline double conditional_entropy(std::span<const int> target, std::span<const int> given) {
  require(target.size() == given.size(), Errc::length_mismatch,
          "conditional entropy needs aligned sequences (", target.size(), " vs ", given.size(), ")");
  double h = joint_entropy(target, given) - code_entropy(given);
  return h < 0.0 && h > -1e-12 ? 0.0 : h;
}

// Transfer entropy from source to target with history windows:
//   TE = H(next | target hist) - H(next | target hist, source hist)
// where the histories are the target_history (resp. source_history) codes
// ending one step before "next". Four joint histograms over the aligned
// windows give the two conditional entropies; plug-in TE is an empirical
// conditional mutual information, so anything in (-1e-12, 0) is rounding
// noise and clamps to 0.
inline double transfer_entropy(const BinnedSeries& source, const BinnedSeries& target,
                               int target_history = 1, int source_history = 1) {
  require(target_history >= 1 && source_history >= 1, Errc::bad_dims,
          "history lengths must be >= 1");
  const auto& tc = target.codes;
  const auto& sc = source.codes;
  require(tc.size() == sc.size(), Errc::length_mismatch, "series length mismatch (", sc.size(),
          " vs ", tc.size(), ")");
  const int t = static_cast<int>(tc.size());
  const int h = std::max(target_history, source_history);
  require(t > h + 1, Errc::series_too_short, "series of length ", t,
          " too short for history max(", target_history, ",", source_history, ")");

  const std::uint64_t d_t = static_cast<std::uint64_t>(target.bin_count);
  const std::uint64_t d_s = static_cast<std::uint64_t>(source.bin_count);
  const double key_bits = std::log2(static_cast<double>(d_t)) * (1 + target_history) +
                          std::log2(static_cast<double>(d_s)) * source_history;
  require(key_bits < 63.0, Errc::bad_bin_count,
          "bin count / history combination overflows the histogram key space");
  std::uint64_t jspan = 1;
  for (int a = 0; a < source_history; ++a) jspan *= d_s;

  std::map<std::uint64_t, int> n_ih, n_next_ih, n_ih_jh, n_next_ih_jh;
  for (int step = h; step < t; ++step) {
    std::uint64_t ih = 0;
    for (int a = 1; a <= target_history; ++a)
      ih = ih * d_t + static_cast<std::uint64_t>(tc[step - a]);
    std::uint64_t jh = 0;
    for (int a = 1; a <= source_history; ++a)
      jh = jh * d_s + static_cast<std::uint64_t>(sc[step - a]);
    const std::uint64_t next = static_cast<std::uint64_t>(tc[step]);
    ++n_ih[ih];
    ++n_next_ih[ih * d_t + next];
    ++n_ih_jh[ih * jspan + jh];
    ++n_next_ih_jh[(ih * d_t + next) * jspan + jh];
  }

  const double windows = static_cast<double>(t - h);
  const double h_next_given_ih = detail::entropy_from_counts(n_next_ih, windows) -
                                 detail::entropy_from_counts(n_ih, windows);
  const double h_next_given_both = detail::entropy_from_counts(n_next_ih_jh, windows) -
                                   detail::entropy_from_counts(n_ih_jh, windows);
  double te = h_next_given_ih - h_next_given_both;
  if (te < 0.0 && te > -1e-12) te = 0.0;
  return te;
}

// Pairwise transfer entropies of a signal matrix. values(i, j) is the flow
// from channel j onto channel i (row = effect, column = cause), diagonal 0.
struct TEMatrix {
  Matrix values;
  int target_history = 1;
  int source_history = 1;
  int bin_count = 8;

  int n() const { return static_cast<int>(values.rows()); }
};

inline TEMatrix te_matrix(const SignalMatrix& signals, int bin_count, int target_history = 1,
                          int source_history = 1) {
  validate_signals(signals);
  const int n = signals.n();
  std::vector<BinnedSeries> binned(n);
  std::vector<double> series(signals.t());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < signals.t(); ++j) series[j] = signals.values(i, j);
    binned[i] = bin_series(series, bin_count);
  }

  TEMatrix te;
  te.values = Matrix::Zero(n, n);
  te.target_history = target_history;
  te.source_history = source_history;
  te.bin_count = bin_count;
  for (int effect = 0; effect < n; ++effect) {
    for (int cause = 0; cause < n; ++cause) {
      if (effect == cause) continue;
      try {
        te.values(effect, cause) =
            transfer_entropy(binned[cause], binned[effect], target_history, source_history);
      } catch (const Error& e) {
        fail(e.code(), "te_matrix entry (effect ", effect, ", cause ", cause, "): ", e.what());
      }
    }
  }
  return te;
}

// n x n CSV at 12 significant digits, row = effect channel, column = cause.
inline void write_te_csv(const TEMatrix& te, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write TE matrix to ", path.string());
  char buf[32];
  for (int i = 0; i < te.n(); ++i) {
    for (int j = 0; j < te.n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", te.values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

inline TEMatrix load_te_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::missing_file, "cannot open TE matrix ", path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int r = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      row[j] = detail::parse_cell(fields[j], r, static_cast<int>(j));
    rows.push_back(std::move(row));
    ++r;
  }
  require(r > 0, Errc::serialization_error, "empty TE matrix file ", path.string());
  TEMatrix te;
  te.values.resize(r, r);
  for (int i = 0; i < r; ++i) {
    require(static_cast<int>(rows[i].size()) == r, Errc::ragged_rows,
            "TE matrix row ", i, " has ", rows[i].size(), " entries, expected ", r);
    for (int j = 0; j < r; ++j) te.values(i, j) = rows[i][j];
  }
  return te;
}

}  // namespace cgb
