#pragma once

#include <array>
#include <span>

#include "gpa/augment.hpp"
#include "gpa/encoder.hpp"

namespace gpa {

// Two-layer MLP with relu: [z_i || z_j] (width 2*embed_dim) -> hidden -> 1.
struct ScoreNetConfig {
  int hidden_dim = 128;
  int embed_dim = 128;  // must match the encoder hidden_dim
};

// Parameter names: score.w1/b1/w2/b2.
ParamSet make_score_params(const ScoreNetConfig& cfg, uint64_t seed);

// Per-graph probability simplex over the 15 pairs, Table-2 order.
struct ScoreVector {
  std::array<double, kNumAugPairs> probs{};
  int graph_id = 0;
};

// Argmax pair; ties break toward the lowest pair index.
AugPair select_argmax(const ScoreVector& s);

// Scores every pair for every graph, on the tape: one stochastic draw per
// augmentation type (a second draw for same-type non-identical pairs), each
// view embedded with projection, pair features scored by the MLP, softmax
// across the 15 logits. Gradients flow into both encoder and score params.
// With reuse_embeddings the per-type views are embedded once and shared by
// all pairs; without it every pair re-derives its two views (same streams,
// so the result is identical).
Var score_alpha(Tape& tape, std::span<const Graph* const> graphs, std::span<const int> graph_ids,
                const std::map<std::string, Var>& encoder_params,
                const std::map<std::string, Var>& score_params, const EncoderConfig& enc_cfg,
                const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch,
                bool reuse_embeddings = true);

std::vector<ScoreVector> batch_scores(std::span<const Graph* const> graphs,
                                      std::span<const int> graph_ids, const ParamSet& encoder,
                                      const ParamSet& score_net, const EncoderConfig& enc_cfg,
                                      const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch,
                                      bool reuse_embeddings = true);

ScoreVector score_pairs(const Graph& g, int graph_id, const ParamSet& encoder,
                        const ParamSet& score_net, const EncoderConfig& enc_cfg,
                        const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch);

// Constant (non-gradient) binding, for selection-only forward passes.
std::map<std::string, Var> bind_constants(Tape& tape, const ParamSet& params);

}  // namespace gpa
