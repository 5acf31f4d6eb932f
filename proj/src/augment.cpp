#include "gpa/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gpa {

const char* aug_type_name(AugType t) {
  switch (t) {
    case AugType::Identical: return "Identical";
    case AugType::NodeDrop: return "NodeDrop";
    case AugType::EdgePert: return "EdgePert";
    case AugType::Subgraph: return "Subgraph";
    case AugType::AttMask: return "AttMask";
  }
  return "?";
}

std::vector<AugPair> enumerate_pairs(int k) {
  if (k < 1) throw std::invalid_argument("enumerate_pairs: k must be >= 1");
  std::vector<AugPair> out;
  out.reserve(k * (k + 1) / 2);
  for (int i = 1; i <= k; ++i)
    for (int j = i; j <= k; ++j)
      out.push_back(AugPair(static_cast<AugType>(i), static_cast<AugType>(j)));
  return out;
}

int pair_index(AugPair p) {
  const int i = static_cast<int>(p.i), j = static_cast<int>(p.j);
  // Rows before i contribute (K) + (K-1) + ... ; closed form over K=5.
  int idx = 0;
  for (int r = 1; r < i; ++r) idx += kNumAugTypes - r + 1;
  return idx + (j - i);
}

AugPair pair_from_index(int idx) {
  static const std::vector<AugPair> all = enumerate_pairs(kNumAugTypes);
  return all.at(static_cast<size_t>(idx));
}

std::string pair_name(AugPair p) {
  return std::string(aug_type_name(p.i)) + "+" + aug_type_name(p.j);
}

int drop_count(double ratio, int n) {
  return static_cast<int>(std::floor(ratio * n + 1e-9));
}

int subgraph_target(double ratio, int n) {
  return static_cast<int>(std::ceil((1.0 - ratio) * n - 1e-9));
}

Graph identical(const Graph& g) { return g; }

namespace {

// Induced subgraph on `keep` (sorted node list), relabeled contiguously.
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  std::vector<int> remap(g.num_nodes, -1);
  for (size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edges;
  for (int u : keep)
    for (int k = g.csr_offsets[u]; k < g.csr_offsets[u + 1]; ++k) {
      int v = g.csr_neighbors[k];
      if (u < v && remap[v] >= 0) edges.emplace_back(remap[u], remap[v]);
    }
  Tensor feats;
  if (g.features.numel() > 0) {
    feats = Tensor(static_cast<int>(keep.size()), g.features.ncols);
    for (size_t i = 0; i < keep.size(); ++i)
      for (int j = 0; j < g.features.ncols; ++j)
        feats.at(static_cast<int>(i), j) = g.features.at(keep[i], j);
  }
  std::vector<int> labels;
  if (!g.node_labels.empty()) {
    labels.reserve(keep.size());
    for (int u : keep) labels.push_back(g.node_labels[u]);
  }
  return make_graph(static_cast<int>(keep.size()), edges, std::move(feats), g.label,
                    std::move(labels));
}

}  // namespace

Graph node_drop(const Graph& g, double ratio, RngStream& rng, bool* fell_back) {
  if (fell_back) *fell_back = false;
  const int k = drop_count(ratio, g.num_nodes);
  if (k >= g.num_nodes) {
    if (fell_back) *fell_back = true;
    return g;
  }
  if (k == 0) return g;
  std::vector<int> dropped = rng.sample_indices(g.num_nodes, k);
  std::vector<bool> gone(g.num_nodes, false);
  for (int v : dropped) gone[v] = true;
  std::vector<int> keep;
  keep.reserve(g.num_nodes - k);
  for (int v = 0; v < g.num_nodes; ++v)
    if (!gone[v]) keep.push_back(v);
  return induced_subgraph(g, keep);
}

Graph edge_perturb(const Graph& g, double ratio, RngStream& rng) {
  const auto edges = g.undirected_edges();
  const int m = static_cast<int>(edges.size());
  const int b = drop_count(ratio, m);
  if (b == 0) return g;

  std::vector<int> removed_idx = rng.sample_indices(m, b);
  std::vector<bool> removed(m, false);
  for (int i : removed_idx) removed[i] = true;
  std::set<std::pair<int, int>> current;
  for (int i = 0; i < m; ++i)
    if (!removed[i]) current.insert(edges[i]);

  // Additions are sampled after removals, so removed slots can be re-added.
  std::vector<std::pair<int, int>> non_edges;
  for (int u = 0; u < g.num_nodes; ++u)
    for (int v = u + 1; v < g.num_nodes; ++v)
      if (!current.count({u, v})) non_edges.emplace_back(u, v);
  const int addable = std::min<int>(b, static_cast<int>(non_edges.size()));
  for (int pick : rng.sample_indices(static_cast<int>(non_edges.size()), addable))
    current.insert(non_edges[pick]);

  std::vector<std::pair<int, int>> final_edges(current.begin(), current.end());
  Graph out = make_graph(g.num_nodes, final_edges, g.features, g.label, g.node_labels);
  return out;
}

Graph subgraph_rw(const Graph& g, double ratio, RngStream& rng, int walk_budget_factor) {
  const int n = g.num_nodes;
  if (n == 0) return g;
  const int target = std::max(1, subgraph_target(ratio, n));
  if (target >= n) return g;

  std::vector<bool> visited(n, false);
  std::vector<int> unvisited(n);
  for (int v = 0; v < n; ++v) unvisited[v] = v;
  auto visit = [&](int v) {
    if (visited[v]) return;
    visited[v] = true;
    auto it = std::find(unvisited.begin(), unvisited.end(), v);
    std::swap(*it, unvisited.back());
    unvisited.pop_back();
  };

  long budget = static_cast<long>(walk_budget_factor) * n;
  int visited_count = 0;
  int current = static_cast<int>(rng.next_index(n));
  visit(current);
  ++visited_count;
  while (visited_count < target) {
    const int deg = g.degree(current);
    if (budget <= 0 || deg == 0) {
      current = unvisited[rng.next_index(unvisited.size())];
      visit(current);
      ++visited_count;
      continue;
    }
    --budget;
    current = g.csr_neighbors[g.csr_offsets[current] + rng.next_index(deg)];
    if (!visited[current]) {
      visit(current);
      ++visited_count;
    }
  }
  std::vector<int> keep;
  keep.reserve(target);
  for (int v = 0; v < n; ++v)
    if (visited[v]) keep.push_back(v);
  return induced_subgraph(g, keep);
}

Graph attr_mask(const Graph& g, double ratio, RngStream& rng) {
  const int k = drop_count(ratio, g.num_nodes);
  Graph out = g;
  if (k == 0 || g.features.numel() == 0) return out;
  for (int v : rng.sample_indices(g.num_nodes, k))
    for (int j = 0; j < out.features.ncols; ++j) out.features.at(v, j) = 0.0;
  return out;
}

Graph apply_aug(const Graph& g, AugType type, const AugConfig& cfg, RngStream& rng) {
  switch (type) {
    case AugType::Identical: return identical(g);
    case AugType::NodeDrop: return node_drop(g, cfg.ratio, rng);
    case AugType::EdgePert: return edge_perturb(g, cfg.ratio, rng);
    case AugType::Subgraph: return subgraph_rw(g, cfg.ratio, rng, cfg.walk_budget_factor);
    case AugType::AttMask: return attr_mask(g, cfg.ratio, rng);
  }
  throw std::logic_error("unknown augmentation type");
}

std::pair<Graph, Graph> apply_pair(const Graph& g, AugPair pair, const AugConfig& cfg,
                                   RngStream& rng_i, RngStream& rng_j) {
  return {apply_aug(g, pair.i, cfg, rng_i), apply_aug(g, pair.j, cfg, rng_j)};
}

}  // namespace gpa
