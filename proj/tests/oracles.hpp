// Brute-force reference implementations used only by tests. These stay
// deliberately naive and independent of the library code paths they check.
#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "cgb/types.hpp"

namespace oracle {

// Direct evaluation of the transfer-entropy sum over the empirical joint
// histogram of (next, target-history, source-history) tuples:
//   TE = sum p(next, ih, jh) * log2( p(next | ih, jh) / p(next | ih) )
inline double te_bruteforce(const std::vector<int>& source, const std::vector<int>& target,
                            int q, int o) {
  const int t = static_cast<int>(target.size());
  const int h = std::max(q, o);
  using Key = std::vector<int>;
  std::map<Key, int> joint, hist_ih, hist_next_ih, hist_ih_jh;
  for (int step = h; step < t; ++step) {
    Key ih, jh;
    for (int a = 1; a <= q; ++a) ih.push_back(target[step - a]);
    for (int a = 1; a <= o; ++a) jh.push_back(source[step - a]);
    Key next_ih = ih;
    next_ih.insert(next_ih.begin(), target[step]);
    Key ih_jh = ih;
    ih_jh.insert(ih_jh.end(), jh.begin(), jh.end());
    Key full = next_ih;
    full.insert(full.end(), jh.begin(), jh.end());
    ++joint[full];
    ++hist_ih[ih];
    ++hist_next_ih[next_ih];
    ++hist_ih_jh[ih_jh];
  }
  const double total = static_cast<double>(t - h);
  double te = 0.0;
  for (const auto& [full, count] : joint) {
    // full = (next, ih..., jh...)
    Key next_ih(full.begin(), full.begin() + 1 + q);
    Key ih(full.begin() + 1, full.begin() + 1 + q);
    Key ih_jh(full.begin() + 1, full.end());
    const double p = count / total;
    const double p_next_given_both = static_cast<double>(count) / hist_ih_jh.at(ih_jh);
    const double p_next_given_ih =
        static_cast<double>(hist_next_ih.at(next_ih)) / hist_ih.at(ih);
    te += p * std::log2(p_next_given_both / p_next_given_ih);
  }
  return te;
}

// Direct-sum conditional entropy H(T | G) = -sum p(t, g) log2 p(t | g).
inline double conditional_entropy_direct(const std::vector<int>& target,
                                         const std::vector<int>& given) {
  std::map<std::pair<int, int>, int> joint;
  std::map<int, int> marginal;
  for (std::size_t i = 0; i < target.size(); ++i) {
    ++joint[{target[i], given[i]}];
    ++marginal[given[i]];
  }
  const double total = static_cast<double>(target.size());
  double h = 0.0;
  for (const auto& [cell, count] : joint) {
    const double p = count / total;
    const double p_cond = static_cast<double>(count) / marginal.at(cell.second);
    h -= p * std::log2(p_cond);
  }
  return h;
}

// Balanced Forman curvature by exhaustive 4-tuple iteration.
struct NaiveEdgeInfo {
  int d_i = 0, d_j = 0;
  int triangles = 0;
  int sq_i = 0, sq_j = 0;
  int gamma_max = 0;
  double ric = 0.0;  // leaf-edge convention applied
};

inline NaiveEdgeInfo naive_balanced_forman(const cgb::IntMatrix& s, int i, int j) {
  const int n = static_cast<int>(s.rows());
  NaiveEdgeInfo info;
  for (int k = 0; k < n; ++k) {
    info.d_i += s(i, k) != 0;
    info.d_j += s(j, k) != 0;
    if (s(i, k) != 0 && s(j, k) != 0) ++info.triangles;
  }

  std::vector<int> cycles_through(n, 0);
  std::vector<bool> k_in_cycle(n, false), l_in_cycle(n, false);
  for (int k = 0; k < n; ++k) {
    if (k == i || k == j) continue;
    if (s(i, k) == 0 || s(j, k) != 0) continue;  // k must neighbour i only
    for (int l = 0; l < n; ++l) {
      if (l == i || l == j || l == k) continue;
      if (s(j, l) == 0 || s(i, l) != 0) continue;  // l must neighbour j only
      if (s(k, l) == 0) continue;                  // close the cycle i-k-l-j
      k_in_cycle[k] = true;
      l_in_cycle[l] = true;
      ++cycles_through[k];
      ++cycles_through[l];
    }
  }
  for (int v = 0; v < n; ++v) {
    info.sq_i += k_in_cycle[v];
    info.sq_j += l_in_cycle[v];
    info.gamma_max = std::max(info.gamma_max, cycles_through[v]);
  }

  const double d_max = std::max(info.d_i, info.d_j);
  const double d_min = std::min(info.d_i, info.d_j);
  double ric = 2.0 / info.d_i + 2.0 / info.d_j - 2.0 + 2.0 * info.triangles / d_max +
               info.triangles / d_min;
  if (info.gamma_max > 0) ric += (1.0 / info.gamma_max) / d_max * (info.sq_i + info.sq_j);
  info.ric = d_min == 1.0 ? 0.0 : ric;
  return info;
}

}  // namespace oracle
