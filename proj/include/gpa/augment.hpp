#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gpa/graph.hpp"
#include "gpa/rng.hpp"

namespace gpa {

// Indices follow Table-2 numbering A1..A5.
enum class AugType : int {
  Identical = 1,
  NodeDrop = 2,
  EdgePert = 3,
  Subgraph = 4,
  AttMask = 5,
};
constexpr int kNumAugTypes = 5;
constexpr int kNumAugPairs = 15;  // unordered pairs with replacement

const char* aug_type_name(AugType t);

// Unordered pair in canonical form (i <= j).
struct AugPair {
  AugType i = AugType::Identical;
  AugType j = AugType::Identical;

  AugPair() = default;
  AugPair(AugType a, AugType b) : i(a < b ? a : b), j(a < b ? b : a) {}
  bool operator==(const AugPair&) const = default;
};

// All K(K+1)/2 pairs in row order (1,1),(1,2),...,(K,K).
std::vector<AugPair> enumerate_pairs(int k = kNumAugTypes);
int pair_index(AugPair p);          // position in enumerate_pairs(5)
AugPair pair_from_index(int idx);
std::string pair_name(AugPair p);   // e.g. "Identical+NodeDrop"

struct AugConfig {
  double ratio = 0.2;
  int walk_budget_factor = 10;
};

// Stream slot codes; a view's randomness is fully determined by
// (global_seed, graph_id, epoch, slot).
namespace slots {
constexpr uint64_t kViewA = 0;
constexpr uint64_t kViewB = 1;
inline uint64_t score_draw(AugType type, int draw) {
  return 8 + 2 * static_cast<uint64_t>(type) + static_cast<uint64_t>(draw);
}
constexpr uint64_t kTrainSampler = 1000;
constexpr uint64_t kValidSampler = 1001;
constexpr uint64_t kRandomPair = 1002;
}  // namespace slots

Graph identical(const Graph& g);

// Drops floor(ratio*n) distinct nodes and incident edges; survivors keep
// their relative order. Falls back to identical when nothing would remain.
Graph node_drop(const Graph& g, double ratio, RngStream& rng, bool* fell_back = nullptr);

// Removes b = floor(ratio*m) existing edges, then adds min(b, available)
// new undirected edges sampled after the removals.
Graph edge_perturb(const Graph& g, double ratio, RngStream& rng);

// Random-walk induced subgraph with ceil((1-ratio)*n) nodes; restarts from a
// uniform unvisited node on dead ends or when the step budget runs out.
Graph subgraph_rw(const Graph& g, double ratio, RngStream& rng, int walk_budget_factor = 10);

// Zeroes the feature rows of floor(ratio*n) distinct nodes.
Graph attr_mask(const Graph& g, double ratio, RngStream& rng);

Graph apply_aug(const Graph& g, AugType type, const AugConfig& cfg, RngStream& rng);

// Two independently randomized views, one per pair member.
std::pair<Graph, Graph> apply_pair(const Graph& g, AugPair pair, const AugConfig& cfg,
                                   RngStream& rng_i, RngStream& rng_j);

// floor/ceil with an epsilon guard against FP artifacts like 0.3*10 -> 2.9999...
int drop_count(double ratio, int n);
int subgraph_target(double ratio, int n);

}  // namespace gpa
