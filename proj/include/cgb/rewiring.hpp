#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cgb/curvature.hpp"
#include "cgb/error.hpp"
#include "cgb/graph.hpp"
#include "cgb/random.hpp"

namespace cgb {

// Causality-informed stochastic discrete Ricci flow: per iteration, support
// the lowest-curvature edge with one sampled causal edge, then optionally
// drop the most positively curved edge when its causal weight is weak.
struct RewireConfig {
  double tau = 20.0;        // softmax temperature, > 0
  int max_iterations = -1;  // negative means "node count"
  std::optional<double> c_plus;   // curvature upper bound for removal
  std::optional<double> c_minus;  // TE lower bound for removal
  double curvature_floor = 0.0;   // converged once min curvature reaches this
  std::uint64_t seed = 0;
};

struct Candidate {
  int k = 0;  // cause
  int l = 0;  // effect
  double x = 0.0;
};

// Candidate supporting edges for a bottleneck (i, j): ordered pairs (k, l)
// with k in the closed 1-hop ball of i and l in the closed ball of j, skipping
// existing directed edges. x = (curvature after adding {k,l} - current) * TE(k->l).
inline std::vector<Candidate> candidate_improvements(const CausalGraph& g,
                                                     std::pair<int, int> bottleneck) {
  const IntMatrix s = symmetrized_view(g);
  const auto [i, j] = bottleneck;
  require(i >= 0 && i < g.n && j >= 0 && j < g.n && i != j && s(i, j) != 0, Errc::not_an_edge,
          "bottleneck (", i, ", ", j, ") is not an edge of the symmetrized view");

  auto closed_ball = [&](int center) {
    std::vector<int> ball;
    for (int v = 0; v < g.n; ++v)
      if (v == center || s(center, v) != 0) ball.push_back(v);
    return ball;
  };
  const auto ball_i = closed_ball(i);
  const auto ball_j = closed_ball(j);

  const double base_ric = balanced_forman(s, i, j);
  std::vector<Candidate> out;
  for (int k : ball_i) {
    for (int l : ball_j) {
      if (k == l || g.has_edge(k, l)) continue;
      double augmented =
          s(k, l) != 0 ? base_ric  // reverse direction exists; undirected view unchanged
                       : curvature_with_candidate(s, {i, j}, {k, l});
      out.push_back({k, l, (augmented - base_ric) * g.te(l, k)});
    }
  }
  require(!out.empty(), Errc::no_candidates, "both 1-hop balls of (", i, ", ", j,
          ") are saturated");
  return out;
}

// Draw a candidate with probability softmax(tau * x).
inline Candidate sample_edge(std::span<const Candidate> candidates, double tau, Rng& rng) {
  require(!candidates.empty(), Errc::empty_candidates, "no candidates to sample from");
  double x_max = candidates[0].x;
  for (const auto& c : candidates) x_max = std::max(x_max, c.x);
  std::vector<double> weight(candidates.size());
  double total = 0.0;
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    weight[idx] = std::exp(tau * (candidates[idx].x - x_max));
    total += weight[idx];
  }
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    acc += weight[idx];
    if (u < acc) return candidates[idx];
  }
  return candidates.back();
}

// Examine the maximal-curvature edge; remove its weakest causal direction iff
// Ric > c_plus and that direction's TE < c_minus. No connectivity guard.
inline std::optional<std::pair<int, int>> removal_step(CausalGraph& g,
                                                       const CurvatureReport& report,
                                                       double c_plus, double c_minus) {
  if (!(report.max_ric > c_plus)) return std::nullopt;
  const auto [i, j] = report.max_edge;
  struct Dir {
    int cause, effect;
    double te;
  };
  std::vector<Dir> dirs;
  if (g.adj(j, i) != 0) dirs.push_back({i, j, g.te(j, i)});
  if (g.adj(i, j) != 0) dirs.push_back({j, i, g.te(i, j)});
  if (dirs.empty()) return std::nullopt;
  const Dir& weakest = (dirs.size() == 2 && dirs[1].te < dirs[0].te) ? dirs[1] : dirs[0];
  if (!(weakest.te < c_minus)) return std::nullopt;
  g.adj(weakest.effect, weakest.cause) = 0;
  return std::make_pair(weakest.cause, weakest.effect);
}

// Full CSDRF loop. Stops when the minimum curvature reaches the floor, when no
// candidate improves the bottleneck, or after max_iterations. Deterministic
// given the config seed.
inline std::pair<CausalGraph, RewiringLog> rewire(const CausalGraph& g,
                                                  const RewireConfig& cfg) {
  require(cfg.tau > 0.0, Errc::config_error, "rewiring tau must be > 0, got ", cfg.tau);
  require(g.edge_count() > 0, Errc::empty_graph, "cannot rewire a graph without edges");

  CausalGraph current = g;
  RewiringLog log;
  Rng rng(cfg.seed);
  const int max_iter = cfg.max_iterations < 0 ? g.n : cfg.max_iterations;
  const bool removal_enabled = cfg.c_plus.has_value() && cfg.c_minus.has_value();

  for (int iter = 0; iter < max_iter; ++iter) {
    const IntMatrix s = symmetrized_view(current);
    if (s.sum() == 0) break;
    const CurvatureReport report = curvature_report(s);
    if (report.min_ric >= cfg.curvature_floor) break;

    std::vector<Candidate> candidates;
    try {
      candidates = candidate_improvements(current, report.min_edge);
    } catch (const Error& e) {
      if (e.code() == Errc::no_candidates) break;
      throw;
    }
    double best = candidates[0].x;
    for (const auto& c : candidates) best = std::max(best, c.x);
    if (best <= 0.0) break;  // no causally useful support left

    const Candidate chosen = sample_edge(candidates, cfg.tau, rng);
    current.adj(chosen.l, chosen.k) = 1;

    RewireRecord record;
    record.bottleneck = report.min_edge;
    record.bottleneck_ric = report.min_ric;
    record.candidates_evaluated = static_cast<int>(candidates.size());
    record.added = {chosen.k, chosen.l};
    record.added_x = chosen.x;
    if (removal_enabled) {
      const CurvatureReport after = curvature_report(symmetrized_view(current));
      record.removed = removal_step(current, after, *cfg.c_plus, *cfg.c_minus);
    }
    log.iterations.push_back(record);
  }

  if (max_iter != 0) {
    current.provenance.rewired = true;
    current.provenance.rewiring_log = log;
  }
  return {std::move(current), std::move(log)};
}

// Line-oriented audit trail, one record per iteration.
inline void write_rewiring_log(const RewiringLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write rewiring log to ", path.string());
  char buf[32];
  for (std::size_t it = 0; it < log.iterations.size(); ++it) {
    const auto& r = log.iterations[it];
    out << "iter=" << it << " bottleneck=(" << r.bottleneck.first << ',' << r.bottleneck.second
        << ")";
    std::snprintf(buf, sizeof buf, "%.12g", r.bottleneck_ric);
    out << " ric=" << buf << " candidates=" << r.candidates_evaluated << " added=("
        << r.added.first << ',' << r.added.second << ")";
    std::snprintf(buf, sizeof buf, "%.12g", r.added_x);
    out << " x=" << buf;
    if (r.removed)
      out << " removed=(" << r.removed->first << ',' << r.removed->second << ")";
    else
      out << " removed=none";
    out << "\n";
  }
}

}  // namespace cgb
