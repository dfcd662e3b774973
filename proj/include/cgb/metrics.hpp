#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "cgb/error.hpp"

namespace cgb {

struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

struct EvalMetrics {
  Confusion confusion;
  double f1 = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::optional<double> auc;  // empty when the split holds a single class
};

inline Confusion confusion_at_threshold(std::span<const double> probs, std::span<const int> labels,
                                        double threshold = 0.5) {
  require(probs.size() == labels.size(), Errc::length_mismatch,
          "prediction/label count mismatch (", probs.size(), " vs ", labels.size(), ")");
  Confusion c;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] > threshold;
    if (labels[i] == 1)
      pred ? ++c.tp : ++c.fn;
    else
      pred ? ++c.fp : ++c.tn;
  }
  return c;
}

inline EvalMetrics metrics_from_confusion(const Confusion& c) {
  EvalMetrics m;
  m.confusion = c;
  const double f1_denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.f1 = f1_denom > 0 ? 2.0 * c.tp / f1_denom : 0.0;
  m.sensitivity = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  m.specificity = (c.tn + c.fp) > 0 ? static_cast<double>(c.tn) / (c.tn + c.fp) : 0.0;
  return m;
}

// Rank-statistic AUC with midrank tie handling; empty when only one class is
// present.
inline std::optional<double> auc_midrank(std::span<const double> probs,
                                         std::span<const int> labels) {
  require(probs.size() == labels.size(), Errc::length_mismatch,
          "prediction/label count mismatch (", probs.size(), " vs ", labels.size(), ")");
  const std::size_t n = probs.size();
  long n_pos = 0;
  for (int y : labels) n_pos += y == 1;
  const long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && probs[order[j + 1]] == probs[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  return (rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline EvalMetrics evaluate_predictions(std::span<const double> probs,
                                        std::span<const int> labels) {
  EvalMetrics m = metrics_from_confusion(confusion_at_threshold(probs, labels));
  m.auc = auc_midrank(probs, labels);
  return m;
}

}  // namespace cgb
