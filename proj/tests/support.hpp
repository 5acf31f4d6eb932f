#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gpa/graph.hpp"
#include "gpa/rng.hpp"

namespace gpa::testing {

inline Tensor ones_features(int n, int dim) {
  Tensor f(n, dim);
  for (auto& x : f.values) x = 1.0;
  return f;
}

inline Graph triangle(int feature_dim = 0) {
  Tensor f = feature_dim ? ones_features(3, feature_dim) : Tensor();
  return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, std::move(f));
}

inline Graph path2(int feature_dim = 0) {
  Tensor f = feature_dim ? ones_features(2, feature_dim) : Tensor();
  return make_graph(2, {{0, 1}}, std::move(f));
}

inline Graph ring(int n, int feature_dim = 0) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  Tensor f = feature_dim ? ones_features(n, feature_dim) : Tensor();
  return make_graph(n, edges, std::move(f));
}

inline Graph clique(int n, int feature_dim = 0) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  Tensor f = feature_dim ? ones_features(n, feature_dim) : Tensor();
  return make_graph(n, edges, std::move(f));
}

inline Graph random_graph(RngStream& rng, int max_nodes = 20, int feature_dim = 3) {
  int n = 1 + static_cast<int>(rng.next_index(max_nodes));
  std::vector<std::pair<int, int>> edges;
  double p = rng.next_double();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < p) edges.emplace_back(i, j);
  Tensor f(n, feature_dim);
  for (auto& x : f.values) x = rng.next_double() * 2.0 - 1.0;
  return make_graph(n, edges, std::move(f));
}

// Two-class toy set: rings (label 0) vs cliques (label 1), sizes jittered,
// degree one-hot style features filled in by the caller or left constant.
inline GraphDataset toy_dataset(int per_class, int feature_dim = 4, uint64_t seed = 7) {
  GraphDataset ds;
  ds.name = "toy";
  ds.num_classes = 2;
  ds.feature_dim = feature_dim;
  RngStream rng(seed, 0, 0, 99);
  for (int i = 0; i < per_class; ++i) {
    Graph a = ring(5 + static_cast<int>(rng.next_index(4)), feature_dim);
    a.label = 0;
    Graph b = clique(4 + static_cast<int>(rng.next_index(3)), feature_dim);
    b.label = 1;
    ds.graphs.push_back(std::move(a));
    ds.graphs.push_back(std::move(b));
  }
  return ds;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    dir_ = std::filesystem::temp_directory_path() /
           ("gpa_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace gpa::testing

namespace gpa::testing {

inline bool graphs_equal(const gpa::Graph& a, const gpa::Graph& b) {
  return a.num_nodes == b.num_nodes && a.csr_offsets == b.csr_offsets &&
         a.csr_neighbors == b.csr_neighbors && a.features.values == b.features.values &&
         a.features.ncols == b.features.ncols && a.label == b.label &&
         a.node_labels == b.node_labels;
}

inline gpa::Graph disjoint_union(const gpa::Graph& a, const gpa::Graph& b) {
  std::vector<std::pair<int, int>> edges = a.undirected_edges();
  for (auto [u, v] : b.undirected_edges()) edges.emplace_back(u + a.num_nodes, v + a.num_nodes);
  gpa::Tensor f;
  if (a.features.ncols == b.features.ncols && a.features.ncols > 0) {
    f = gpa::Tensor(a.num_nodes + b.num_nodes, a.features.ncols);
    f.values = a.features.values;
    f.values.insert(f.values.end(), b.features.values.begin(), b.features.values.end());
  }
  return gpa::make_graph(a.num_nodes + b.num_nodes, edges, std::move(f));
}

}  // namespace gpa::testing

namespace gpa::testing {

// Relabels nodes: node v becomes perm[v]; features and adjacency follow.
inline gpa::Graph permute_graph(const gpa::Graph& g, const std::vector<int>& perm) {
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : g.undirected_edges()) edges.emplace_back(perm[u], perm[v]);
  gpa::Tensor f;
  if (g.features.numel() > 0) {
    f = gpa::Tensor(g.num_nodes, g.features.ncols);
    for (int v = 0; v < g.num_nodes; ++v)
      for (int j = 0; j < g.features.ncols; ++j) f.at(perm[v], j) = g.features.at(v, j);
  }
  std::vector<int> labels;
  if (!g.node_labels.empty()) {
    labels.resize(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v) labels[perm[v]] = g.node_labels[v];
  }
  return gpa::make_graph(g.num_nodes, edges, std::move(f), g.label, std::move(labels));
}

}  // namespace gpa::testing
