#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpa/tensor.hpp"

namespace gpa {

// Undirected graph in CSR form. Each edge is stored in both directions and
// neighbor lists are kept sorted; no self-loops, no duplicates.
struct Graph {
  int num_nodes = 0;
  std::vector<int> csr_offsets;    // length num_nodes + 1
  std::vector<int> csr_neighbors;  // both directions
  Tensor features;                 // [num_nodes x feature_dim], may be 0-wide
  std::optional<int> label;
  std::vector<int> node_labels;    // raw TU node labels; empty when absent

  int degree(int v) const { return csr_offsets[v + 1] - csr_offsets[v]; }
  int undirected_edge_count() const { return static_cast<int>(csr_neighbors.size()) / 2; }
  int feature_dim() const { return features.ncols; }
  bool has_edge(int u, int v) const;

  // Unique undirected edges as (u, v) with u < v, lexicographic order.
  std::vector<std::pair<int, int>> undirected_edges() const;

  // Throws std::logic_error naming the violated invariant, if any.
  void check_valid() const;
};

// Builds a valid Graph from an arbitrary edge list: symmetrizes, drops
// self-loops and duplicates, sorts neighbor lists. Features/labels copied in.
Graph make_graph(int num_nodes, const std::vector<std::pair<int, int>>& edges,
                 Tensor features = Tensor(), std::optional<int> label = std::nullopt,
                 std::vector<int> node_labels = {});

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  int feature_dim = 0;
  int num_classes = 0;

  int size() const { return static_cast<int>(graphs.size()); }
};

struct DatasetStats {
  int num_graphs = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;  // undirected convention
  int num_classes = 0;
};

DatasetStats stats(const GraphDataset& ds);

struct SplitSpec {
  std::vector<int> train_indices;
  std::vector<int> valid_indices;
  uint64_t seed = 0;
};

// |valid| = round(valid_fraction * N), uniform shuffle, deterministic per seed.
SplitSpec split(const GraphDataset& ds, double valid_fraction, uint64_t seed);

// k disjoint test folds covering all indices, sizes differing by <= 1.
std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold(
    const std::vector<int>& indices, int k, uint64_t seed);

}  // namespace gpa
