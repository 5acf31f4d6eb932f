#include "gpa/selector.hpp"

namespace gpa {

ParamSet make_score_params(const ScoreNetConfig& cfg, uint64_t seed) {
  if (cfg.hidden_dim < 1 || cfg.embed_dim < 1)
    throw std::invalid_argument("score net config requires positive dims");
  ParamSet ps;
  RngStream r1(seed, 0, 0, 0x5C02E0);
  ps.add("score.w1", uniform_init(2 * cfg.embed_dim, cfg.hidden_dim, r1));
  ps.add("score.b1", Tensor(1, cfg.hidden_dim));
  RngStream r2(seed, 0, 0, 0x5C02E1);
  ps.add("score.w2", uniform_init(cfg.hidden_dim, 1, r2));
  ps.add("score.b2", Tensor(1, 1));
  return ps;
}

AugPair select_argmax(const ScoreVector& s) {
  int best = 0;
  for (int i = 1; i < kNumAugPairs; ++i)
    if (s.probs[i] > s.probs[best]) best = i;
  return pair_from_index(best);
}

std::map<std::string, Var> bind_constants(Tape& tape, const ParamSet& params) {
  std::map<std::string, Var> bound;
  for (size_t i = 0; i < params.size(); ++i)
    bound.emplace(params.name(i), tape.constant(params.tensor(i)));
  return bound;
}

namespace {

Graph score_view(const Graph& g, int graph_id, AugType type, int draw, const AugConfig& aug_cfg,
                 uint64_t seed, uint64_t epoch) {
  RngStream rng(seed, static_cast<uint64_t>(graph_id), epoch, slots::score_draw(type, draw));
  return apply_aug(g, type, aug_cfg, rng);
}

// Embedding of every graph's (type, draw) view, stacked as [B x D].
Var embed_type_views(Tape& tape, std::span<const Graph* const> graphs,
                     std::span<const int> graph_ids, AugType type, int draw,
                     const std::map<std::string, Var>& encoder_params,
                     const EncoderConfig& enc_cfg, const AugConfig& aug_cfg, uint64_t seed,
                     uint64_t epoch) {
  std::vector<Graph> views;
  views.reserve(graphs.size());
  for (size_t i = 0; i < graphs.size(); ++i)
    views.push_back(score_view(*graphs[i], graph_ids[i], type, draw, aug_cfg, seed, epoch));
  return embed_graphs(tape, make_batch(std::span<const Graph>(views)), encoder_params, enc_cfg,
                      /*project=*/true);
}

Var score_mlp(Var pair_features, const std::map<std::string, Var>& score_params) {
  Var h = relu(add(matmul(pair_features, score_params.at("score.w1")), score_params.at("score.b1")));
  return add(matmul(h, score_params.at("score.w2")), score_params.at("score.b2"));
}

}  // namespace

Var score_alpha(Tape& tape, std::span<const Graph* const> graphs, std::span<const int> graph_ids,
                const std::map<std::string, Var>& encoder_params,
                const std::map<std::string, Var>& score_params, const EncoderConfig& enc_cfg,
                const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch, bool reuse_embeddings) {
  const auto pairs = enumerate_pairs();
  std::vector<Var> logits;
  logits.reserve(pairs.size());

  if (reuse_embeddings) {
    // First draw per type, second draw for the same-type non-identical pairs.
    std::map<std::pair<int, int>, Var> z;
    for (int t = 1; t <= kNumAugTypes; ++t) {
      const AugType type = static_cast<AugType>(t);
      z[{t, 0}] = embed_type_views(tape, graphs, graph_ids, type, 0, encoder_params, enc_cfg,
                                   aug_cfg, seed, epoch);
      if (type != AugType::Identical)
        z[{t, 1}] = embed_type_views(tape, graphs, graph_ids, type, 1, encoder_params, enc_cfg,
                                     aug_cfg, seed, epoch);
    }
    for (AugPair p : pairs) {
      const int i = static_cast<int>(p.i), j = static_cast<int>(p.j);
      Var zi = z.at({i, 0});
      Var zj = (i == j && p.i != AugType::Identical) ? z.at({j, 1}) : z.at({j, 0});
      logits.push_back(score_mlp(concat_rows(zi, zj), score_params));
    }
  } else {
    for (AugPair p : pairs) {
      const int i = static_cast<int>(p.i), j = static_cast<int>(p.j);
      const int draw_j = (i == j && p.i != AugType::Identical) ? 1 : 0;
      Var zi = embed_type_views(tape, graphs, graph_ids, p.i, 0, encoder_params, enc_cfg, aug_cfg,
                                seed, epoch);
      Var zj = embed_type_views(tape, graphs, graph_ids, p.j, draw_j, encoder_params, enc_cfg,
                                aug_cfg, seed, epoch);
      logits.push_back(score_mlp(concat_rows(zi, zj), score_params));
    }
  }
  return row_softmax(concat_rows(std::span<const Var>(logits.data(), logits.size())));
}

std::vector<ScoreVector> batch_scores(std::span<const Graph* const> graphs,
                                      std::span<const int> graph_ids, const ParamSet& encoder,
                                      const ParamSet& score_net, const EncoderConfig& enc_cfg,
                                      const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch,
                                      bool reuse_embeddings) {
  Tape tape;
  auto enc = bind_constants(tape, encoder);
  auto sc = bind_constants(tape, score_net);
  Tensor alpha = score_alpha(tape, graphs, graph_ids, enc, sc, enc_cfg, aug_cfg, seed, epoch,
                             reuse_embeddings)
                     .value();
  std::vector<ScoreVector> out(graphs.size());
  for (size_t i = 0; i < graphs.size(); ++i) {
    out[i].graph_id = graph_ids[i];
    for (int p = 0; p < kNumAugPairs; ++p) out[i].probs[p] = alpha.at(static_cast<int>(i), p);
  }
  return out;
}

ScoreVector score_pairs(const Graph& g, int graph_id, const ParamSet& encoder,
                        const ParamSet& score_net, const EncoderConfig& enc_cfg,
                        const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch) {
  const Graph* gp = &g;
  return batch_scores(std::span<const Graph* const>(&gp, 1), std::span<const int>(&graph_id, 1),
                      encoder, score_net, enc_cfg, aug_cfg, seed, epoch)[0];
}

}  // namespace gpa
