#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gpa/graph.hpp"
#include "gpa/ops.hpp"
#include "gpa/params.hpp"

namespace gpa {

struct EncoderConfig {
  int num_layers = 3;
  int hidden_dim = 128;
  int feature_dim = 0;
  double gin_eps = 0.0;
};

// Parameter names: gin{L}.w1/b1/w2/b2 per layer, proj.w1/b1/w2/b2 for the
// two-layer projection head. Layer 0 maps feature_dim -> hidden.
ParamSet make_encoder_params(const EncoderConfig& cfg, uint64_t seed);

// Minibatch carrier: node features stacked, adjacency flattened into
// (owner, neighbor) pairs with batch-global node ids.
struct GraphBatch {
  Tensor features;             // [total_nodes x feature_dim]
  std::vector<int> neighbors;  // batch-global node id per adjacency slot
  std::vector<int> owners;     // owning node per adjacency slot
  std::vector<int> graph_ids;  // per node, nondecreasing
  int num_nodes = 0;
  int num_graphs = 0;
};

GraphBatch make_batch(std::span<const Graph> graphs);
GraphBatch make_batch(std::span<const Graph* const> graphs);

// Per-layer GIN update h' = MLP((1+eps) h + sum of neighbor h), two affine
// maps with a relu between.
Var encode_nodes(Tape& tape, const GraphBatch& batch,
                 const std::map<std::string, Var>& params, const EncoderConfig& cfg);

// Sum pooling over each graph's nodes.
Var readout(Var node_embeds, const std::vector<int>& graph_ids, int num_graphs);

// readout(encode_nodes(.)), optionally through the projection head. Projected
// output feeds scoring and the contrastive loss; unprojected feeds evaluation.
Var embed_graphs(Tape& tape, const GraphBatch& batch,
                 const std::map<std::string, Var>& params, const EncoderConfig& cfg,
                 bool project);

// Convenience: forward pass with no gradient bookkeeping needed by callers.
Tensor embed_graphs_value(const GraphBatch& batch, const ParamSet& params,
                          const EncoderConfig& cfg, bool project);

}  // namespace gpa
