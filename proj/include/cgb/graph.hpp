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
#include "cgb/types.hpp"

namespace cgb {

inline constexpr int kGraphSchemaVersion = 1;

// One rewiring iteration, kept for audit. Directed pairs are (cause, effect).
struct RewireRecord {
  std::pair<int, int> bottleneck;  // undirected, first < second
  double bottleneck_ric = 0.0;
  int candidates_evaluated = 0;
  std::pair<int, int> added{-1, -1};
  double added_x = 0.0;
  std::optional<std::pair<int, int>> removed;
};

struct RewiringLog {
  std::vector<RewireRecord> iterations;
};

struct GraphProvenance {
  double threshold_c = 0.0;
  bool rewired = false;
  RewiringLog rewiring_log;
};

// Directed causal graph. adj(i, j) = 1 means an edge from channel j onto
// channel i (row = effect, column = cause), matching the TE matrix layout.
struct CausalGraph {
  int n = 0;
  IntMatrix adj;
  Matrix te;        // n x n TE weights backing the edges
  Matrix features;  // n x n node features: incoming TE profile, zero diagonal
  GraphProvenance provenance;

  bool has_edge(int cause, int effect) const { return adj(effect, cause) != 0; }
  int edge_count() const { return adj.sum(); }
};

inline Matrix node_features(const TEMatrix& te) {
  Matrix x = te.values;
  x.diagonal().setZero();
  return x;
}

// Threshold the TE matrix into a directed adjacency: edge j -> i exists iff
// te(i, j) strictly exceeds c. Isolated nodes are permitted.
inline CausalGraph build_adjacency(const TEMatrix& te, double threshold_c) {
  require(threshold_c >= 0.0, Errc::negative_threshold,
          "threshold c must be nonnegative, got ", threshold_c);
  const int n = te.n();
  CausalGraph g;
  g.n = n;
  g.adj = IntMatrix::Zero(n, n);
  g.te = te.values;
  g.features = node_features(te);
  g.provenance.threshold_c = threshold_c;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && te.values(i, j) > threshold_c) g.adj(i, j) = 1;
  return g;
}

// Undirected view: S = adj OR adj^T, zero diagonal.
inline IntMatrix symmetrized_view(const CausalGraph& g) {
  IntMatrix s = IntMatrix::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && (g.adj(i, j) != 0 || g.adj(j, i) != 0)) s(i, j) = 1;
  return s;
}

struct DirectedEdge {
  int src = 0;  // cause
  int dst = 0;  // effect
  double te = 0.0;
};

inline std::vector<DirectedEdge> directed_edges(const CausalGraph& g) {
  std::vector<DirectedEdge> edges;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.adj(i, j) != 0) edges.push_back({j, i, g.te(i, j)});
  return edges;
}

// Strongest fraction of edges, TE descending, ties by (effect, cause)
// ascending. Returns ceil(fraction * edge_count) edges.
inline std::vector<DirectedEdge> top_fraction_edges(const CausalGraph& g, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, Errc::bad_fraction,
          "fraction must be in (0, 1], got ", fraction);
  auto edges = directed_edges(g);
  require(!edges.empty(), Errc::empty_graph, "graph has no edges");
  std::sort(edges.begin(), edges.end(), [](const DirectedEdge& a, const DirectedEdge& b) {
    if (a.te != b.te) return a.te > b.te;
    if (a.dst != b.dst) return a.dst < b.dst;
    return a.src < b.src;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(edges.size())));
  edges.resize(std::min(keep, edges.size()));
  return edges;
}

inline void write_edge_csv(const std::vector<DirectedEdge>& edges,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write edge list to ", path.string());
  out << "src,dst,te\n";
  char buf[32];
  for (const auto& e : edges) {
    std::snprintf(buf, sizeof buf, "%.12g", e.te);
    out << e.src << ',' << e.dst << ',' << buf << "\n";
  }
}

// --- Serialization -----------------------------------------------------------

inline void save_graph(const CausalGraph& g, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["schema_version"] = kGraphSchemaVersion;
  doc["n"] = g.n;
  doc["threshold_c"] = g.provenance.threshold_c;
  doc["rewired"] = g.provenance.rewired;
  auto& edges = doc["directed_edges"] = nlohmann::json::array();
  for (const auto& e : directed_edges(g))
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"te", e.te}});
  auto& feats = doc["features"] = nlohmann::json::array();
  for (int i = 0; i < g.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < g.n; ++j) row.push_back(g.features(i, j));
    feats.push_back(std::move(row));
  }
  std::ofstream out(path);
  require(out.good(), Errc::serialization_error, "cannot write graph to ", path.string());
  out << doc.dump(2) << "\n";
}

inline CausalGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), Errc::missing_file, "cannot open graph file ", path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::serialization_error, "graph parse error in ", path.string(), ": ", e.what());
  }
  for (const char* field : {"schema_version", "n", "threshold_c", "rewired", "directed_edges",
                            "features"})
    require(doc.contains(field), Errc::schema_mismatch, "graph file missing field \"", field,
            "\"");
  const int version = doc["schema_version"].get<int>();
  require(version == kGraphSchemaVersion, Errc::schema_mismatch, "graph schema version ", version,
          " unsupported; this reader handles version ", kGraphSchemaVersion);

  CausalGraph g;
  g.n = doc["n"].get<int>();
  require(g.n >= 1, Errc::schema_mismatch, "graph file declares n = ", g.n);
  g.provenance.threshold_c = doc["threshold_c"].get<double>();
  g.provenance.rewired = doc["rewired"].get<bool>();
  const auto& feats = doc["features"];
  require(static_cast<int>(feats.size()) == g.n, Errc::schema_mismatch,
          "features row count does not match n");
  g.features.resize(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    require(static_cast<int>(feats[i].size()) == g.n, Errc::schema_mismatch,
            "features row ", i, " has wrong width");
    for (int j = 0; j < g.n; ++j) g.features(i, j) = feats[i][j].get<double>();
  }
  g.te = g.features;  // node features are exactly the (zero-diagonal) TE matrix
  g.adj = IntMatrix::Zero(g.n, g.n);
  for (const auto& e : doc["directed_edges"]) {
    require(e.contains("src") && e.contains("dst") && e.contains("te"), Errc::schema_mismatch,
            "edge record needs src, dst, te");
    const int src = e["src"].get<int>(), dst = e["dst"].get<int>();
    require(src >= 0 && src < g.n && dst >= 0 && dst < g.n && src != dst, Errc::schema_mismatch,
            "edge (", src, " -> ", dst, ") out of range");
    g.adj(dst, src) = 1;
    require(e["te"].get<double>() == g.te(dst, src), Errc::serialization_error,
            "edge (", src, " -> ", dst, ") TE weight disagrees with the features matrix");
  }
  return g;
}

}  // namespace cgb
