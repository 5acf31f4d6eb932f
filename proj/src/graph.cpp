#include "gpa/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpa/errors.hpp"
#include "gpa/rng.hpp"

namespace gpa {

bool Graph::has_edge(int u, int v) const {
  auto first = csr_neighbors.begin() + csr_offsets[u];
  auto last = csr_neighbors.begin() + csr_offsets[u + 1];
  return std::binary_search(first, last, v);
}

std::vector<std::pair<int, int>> Graph::undirected_edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(csr_neighbors.size() / 2);
  for (int u = 0; u < num_nodes; ++u) {
    for (int k = csr_offsets[u]; k < csr_offsets[u + 1]; ++k) {
      int v = csr_neighbors[k];
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

void Graph::check_valid() const {
  if (static_cast<int>(csr_offsets.size()) != num_nodes + 1)
    throw std::logic_error("csr_offsets length != num_nodes+1");
  if (csr_offsets.empty() || csr_offsets.front() != 0)
    throw std::logic_error("csr_offsets[0] != 0");
  for (int v = 0; v < num_nodes; ++v)
    if (csr_offsets[v] > csr_offsets[v + 1]) throw std::logic_error("csr_offsets not nondecreasing");
  if (csr_offsets[num_nodes] != static_cast<int>(csr_neighbors.size()))
    throw std::logic_error("csr_offsets[n] != len(csr_neighbors)");
  for (int u = 0; u < num_nodes; ++u) {
    for (int k = csr_offsets[u]; k < csr_offsets[u + 1]; ++k) {
      int v = csr_neighbors[k];
      if (v < 0 || v >= num_nodes) throw std::logic_error("neighbor out of range");
      if (v == u) throw std::logic_error("self-loop");
      if (k > csr_offsets[u] && csr_neighbors[k - 1] >= v)
        throw std::logic_error("neighbors unsorted or duplicated");
      if (!has_edge(v, u)) throw std::logic_error("adjacency not symmetric");
    }
  }
  if (features.numel() > 0 && features.nrows != num_nodes)
    throw std::logic_error("feature rows != num_nodes");
  if (!node_labels.empty() && static_cast<int>(node_labels.size()) != num_nodes)
    throw std::logic_error("node_labels length != num_nodes");
}

Graph make_graph(int num_nodes, const std::vector<std::pair<int, int>>& edges, Tensor features,
                 std::optional<int> label, std::vector<int> node_labels) {
  std::vector<std::vector<int>> adj(num_nodes);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
      throw std::out_of_range("edge endpoint out of range");
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  Graph g;
  g.num_nodes = num_nodes;
  g.csr_offsets.assign(num_nodes + 1, 0);
  for (int v = 0; v < num_nodes; ++v) {
    auto& nb = adj[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.csr_offsets[v + 1] = g.csr_offsets[v] + static_cast<int>(nb.size());
    g.csr_neighbors.insert(g.csr_neighbors.end(), nb.begin(), nb.end());
  }
  g.features = std::move(features);
  g.label = label;
  g.node_labels = std::move(node_labels);
  return g;
}

DatasetStats stats(const GraphDataset& ds) {
  DatasetStats s;
  s.num_graphs = ds.size();
  s.num_classes = ds.num_classes;
  double nodes = 0, edges = 0;
  for (const Graph& g : ds.graphs) {
    nodes += g.num_nodes;
    edges += g.undirected_edge_count();
  }
  if (s.num_graphs > 0) {
    s.avg_nodes = nodes / s.num_graphs;
    s.avg_edges = edges / s.num_graphs;
  }
  return s;
}

SplitSpec split(const GraphDataset& ds, double valid_fraction, uint64_t seed) {
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0))
    throw std::invalid_argument("valid_fraction must be in (0,1)");
  const int n = ds.size();
  const int n_valid = static_cast<int>(std::llround(valid_fraction * n));
  if (n_valid == 0 || n_valid == n)
    throw DegenerateSplit("split would leave an empty train or valid set");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  RngStream rng(seed, 0, 0, /*slot=*/0x5EED5);
  rng.shuffle(idx);
  SplitSpec spec;
  spec.seed = seed;
  spec.valid_indices.assign(idx.begin(), idx.begin() + n_valid);
  spec.train_indices.assign(idx.begin() + n_valid, idx.end());
  std::sort(spec.valid_indices.begin(), spec.valid_indices.end());
  std::sort(spec.train_indices.begin(), spec.train_indices.end());
  return spec;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold(const std::vector<int>& indices,
                                                                 int k, uint64_t seed) {
  const int n = static_cast<int>(indices.size());
  if (k > n) throw TooManyFolds("k exceeds number of indices");
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  std::vector<int> idx = indices;
  RngStream rng(seed, 0, 0, /*slot=*/0xF01D5);
  rng.shuffle(idx);
  std::vector<std::pair<std::vector<int>, std::vector<int>>> folds;
  folds.reserve(k);
  int base = n / k, extra = n % k, pos = 0;
  for (int f = 0; f < k; ++f) {
    int len = base + (f < extra ? 1 : 0);
    std::vector<int> test(idx.begin() + pos, idx.begin() + pos + len);
    std::vector<int> train;
    train.reserve(n - len);
    train.insert(train.end(), idx.begin(), idx.begin() + pos);
    train.insert(train.end(), idx.begin() + pos + len, idx.end());
    pos += len;
    folds.emplace_back(std::move(train), std::move(test));
  }
  return folds;
}

}  // namespace gpa
