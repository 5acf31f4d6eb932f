#include "gpa/encoder.hpp"

#include "gpa/errors.hpp"

namespace gpa {

ParamSet make_encoder_params(const EncoderConfig& cfg, uint64_t seed) {
  if (cfg.num_layers < 1 || cfg.hidden_dim < 1 || cfg.feature_dim < 1)
    throw std::invalid_argument("encoder config requires positive dims");
  ParamSet ps;
  uint64_t slot = 0;
  auto init = [&](int r, int c) {
    RngStream rng(seed, 0, 0, 0xE4C0 + slot++);
    return uniform_init(r, c, rng);
  };
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = l == 0 ? cfg.feature_dim : cfg.hidden_dim;
    const std::string p = "gin" + std::to_string(l);
    ps.add(p + ".w1", init(in, cfg.hidden_dim));
    ps.add(p + ".b1", Tensor(1, cfg.hidden_dim));
    ps.add(p + ".w2", init(cfg.hidden_dim, cfg.hidden_dim));
    ps.add(p + ".b2", Tensor(1, cfg.hidden_dim));
  }
  ps.add("proj.w1", init(cfg.hidden_dim, cfg.hidden_dim));
  ps.add("proj.b1", Tensor(1, cfg.hidden_dim));
  ps.add("proj.w2", init(cfg.hidden_dim, cfg.hidden_dim));
  ps.add("proj.b2", Tensor(1, cfg.hidden_dim));
  return ps;
}

GraphBatch make_batch(std::span<const Graph* const> graphs) {
  GraphBatch b;
  b.num_graphs = static_cast<int>(graphs.size());
  int total = 0, total_slots = 0;
  for (const Graph* g : graphs) {
    total += g->num_nodes;
    total_slots += static_cast<int>(g->csr_neighbors.size());
  }
  b.num_nodes = total;
  const int fdim = graphs.empty() ? 0 : graphs[0]->feature_dim();
  b.features = Tensor(total, fdim);
  b.graph_ids.reserve(total);
  b.neighbors.reserve(total_slots);
  b.owners.reserve(total_slots);
  int base = 0;
  for (int gi = 0; gi < b.num_graphs; ++gi) {
    const Graph& g = *graphs[gi];
    if (g.feature_dim() != fdim) throw ShapeError("make_batch: inconsistent feature widths");
    for (int v = 0; v < g.num_nodes; ++v) {
      b.graph_ids.push_back(gi);
      for (int j = 0; j < fdim; ++j) b.features.at(base + v, j) = g.features.at(v, j);
      for (int k = g.csr_offsets[v]; k < g.csr_offsets[v + 1]; ++k) {
        b.owners.push_back(base + v);
        b.neighbors.push_back(base + g.csr_neighbors[k]);
      }
    }
    base += g.num_nodes;
  }
  return b;
}

GraphBatch make_batch(std::span<const Graph> graphs) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const Graph& g : graphs) ptrs.push_back(&g);
  return make_batch(std::span<const Graph* const>(ptrs));
}

namespace {

Var affine(Var x, const std::map<std::string, Var>& params, const std::string& w,
           const std::string& b) {
  return add(matmul(x, params.at(w)), params.at(b));
}

}  // namespace

Var encode_nodes(Tape& tape, const GraphBatch& batch,
                 const std::map<std::string, Var>& params, const EncoderConfig& cfg) {
  if (batch.features.ncols != cfg.feature_dim)
    throw ShapeError("encode_nodes: feature width does not match config");
  Var h = tape.constant(batch.features);
  for (int l = 0; l < cfg.num_layers; ++l) {
    Var agg;
    if (batch.neighbors.empty()) {
      agg = tape.constant(Tensor(batch.num_nodes, tape.val(h).ncols));
    } else {
      agg = segment_sum(gather_rows(h, batch.neighbors), batch.owners, batch.num_nodes);
    }
    Var pre = cfg.gin_eps == 0.0 ? add(h, agg) : add(scale(h, 1.0 + cfg.gin_eps), agg);
    const std::string p = "gin" + std::to_string(l);
    h = affine(relu(affine(pre, params, p + ".w1", p + ".b1")), params, p + ".w2", p + ".b2");
  }
  return h;
}

Var readout(Var node_embeds, const std::vector<int>& graph_ids, int num_graphs) {
  return segment_sum(node_embeds, graph_ids, num_graphs);
}

Var embed_graphs(Tape& tape, const GraphBatch& batch,
                 const std::map<std::string, Var>& params, const EncoderConfig& cfg,
                 bool project) {
  Var pooled = readout(encode_nodes(tape, batch, params, cfg), batch.graph_ids, batch.num_graphs);
  if (!project) return pooled;
  return affine(relu(affine(pooled, params, "proj.w1", "proj.b1")), params, "proj.w2", "proj.b2");
}

Tensor embed_graphs_value(const GraphBatch& batch, const ParamSet& params,
                          const EncoderConfig& cfg, bool project) {
  Tape tape;
  auto bound = bind_params(tape, params);
  return embed_graphs(tape, batch, bound, cfg, project).value();
}

}  // namespace gpa
