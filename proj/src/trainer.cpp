#include "gpa/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "gpa/errors.hpp"

namespace gpa {
namespace {

std::vector<const Graph*> gather(const GraphDataset& ds, std::span<const int> idx) {
  std::vector<const Graph*> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(&ds.graphs.at(i));
  return out;
}

// The loss views for a pair use slots kViewA/kViewB regardless of the pair,
// so a one-hot-weighted soft loss reproduces the hard loss bitwise.
std::pair<std::vector<Graph>, std::vector<Graph>> build_views(
    const GraphDataset& ds, std::span<const int> idx, const std::vector<AugPair>& pairs,
    const AugConfig& aug_cfg, uint64_t seed, uint64_t epoch) {
  std::vector<Graph> a, b;
  a.reserve(idx.size());
  b.reserve(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    RngStream ra(seed, static_cast<uint64_t>(idx[k]), epoch, slots::kViewA);
    RngStream rb(seed, static_cast<uint64_t>(idx[k]), epoch, slots::kViewB);
    auto [va, vb] = apply_pair(ds.graphs.at(idx[k]), pairs[k], aug_cfg, ra, rb);
    a.push_back(std::move(va));
    b.push_back(std::move(vb));
  }
  return {std::move(a), std::move(b)};
}

GradMap collect_subset(const std::map<std::string, Var>& bound) { return collect_grads(bound); }

}  // namespace

AugPair draw_random_pair(uint64_t seed, int graph_id, uint64_t epoch) {
  RngStream rng(seed, static_cast<uint64_t>(graph_id), epoch, slots::kRandomPair);
  return pair_from_index(static_cast<int>(rng.next_index(kNumAugPairs)));
}

GpaTrainer::GpaTrainer(const GraphDataset& ds, EncoderConfig enc_cfg, ScoreNetConfig sel_cfg,
                       AugConfig aug_cfg, TrainConfig train_cfg)
    : ds_(&ds),
      enc_cfg_(enc_cfg),
      sel_cfg_(sel_cfg),
      aug_cfg_(aug_cfg),
      train_cfg_(train_cfg) {
  enc_cfg_.feature_dim = ds.feature_dim;
  sel_cfg_.embed_dim = enc_cfg_.hidden_dim;
  if (train_cfg_.batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
  if (train_cfg_.tau <= 0 || train_cfg_.lr <= 0)
    throw std::invalid_argument("tau and lr must be positive");
}

TrainerState GpaTrainer::init_state() const {
  TrainerState st;
  st.w = make_encoder_params(enc_cfg_, train_cfg_.seed);
  st.theta = make_score_params(sel_cfg_, train_cfg_.seed);
  return st;
}

std::vector<AugPair> GpaTrainer::infer_pairs(std::span<const int> batch, const ParamSet& w,
                                             const ParamSet& theta, uint64_t epoch) const {
  auto graphs = gather(*ds_, batch);
  auto scores = batch_scores(std::span<const Graph* const>(graphs), batch, w, theta, enc_cfg_,
                             aug_cfg_, train_cfg_.seed, epoch);
  std::vector<AugPair> pairs;
  pairs.reserve(scores.size());
  for (const ScoreVector& s : scores) pairs.push_back(select_argmax(s));
  return pairs;
}

double GpaTrainer::hard_train_loss(std::span<const int> batch, const ParamSet& w,
                                   const ParamSet& theta, uint64_t epoch, GradMap* grad_w,
                                   const std::vector<AugPair>* forced_pairs) const {
  std::vector<AugPair> pairs =
      forced_pairs ? *forced_pairs : infer_pairs(batch, w, theta, epoch);
  auto [views_a, views_b] = build_views(*ds_, batch, pairs, aug_cfg_, train_cfg_.seed, epoch);
  Tape tape;
  auto bound = bind_params(tape, w);
  Var zi = embed_graphs(tape, make_batch(std::span<const Graph>(views_a)), bound, enc_cfg_, true);
  Var zj = embed_graphs(tape, make_batch(std::span<const Graph>(views_b)), bound, enc_cfg_, true);
  Var loss = ntxent_loss(zi, zj, train_cfg_.tau);
  const double value = loss.value().item();
  if (grad_w) {
    tape.run_backward(loss);
    *grad_w = collect_subset(bound);
  }
  return value;
}

double GpaTrainer::soft_weighted_loss(std::span<const int> batch, const ParamSet& w,
                                      const ParamSet& theta, uint64_t epoch, GradMap* grad_w,
                                      GradMap* grad_theta, const Tensor* alpha_override) const {
  auto graphs = gather(*ds_, batch);
  Tape tape;
  auto enc_bound = bind_params(tape, w);
  auto sc_bound = bind_params(tape, theta);
  Var alpha;
  if (alpha_override) {
    alpha = tape.constant(*alpha_override);
  } else {
    alpha = score_alpha(tape, std::span<const Graph* const>(graphs), batch, enc_bound, sc_bound,
                        enc_cfg_, aug_cfg_, train_cfg_.seed, epoch);
  }
  Var acc;
  const auto pairs = enumerate_pairs();
  for (int p = 0; p < kNumAugPairs; ++p) {
    std::vector<AugPair> forced(batch.size(), pairs[p]);
    auto [views_a, views_b] = build_views(*ds_, batch, forced, aug_cfg_, train_cfg_.seed, epoch);
    Var zi =
        embed_graphs(tape, make_batch(std::span<const Graph>(views_a)), enc_bound, enc_cfg_, true);
    Var zj =
        embed_graphs(tape, make_batch(std::span<const Graph>(views_b)), enc_bound, enc_cfg_, true);
    Var per_graph = ntxent_per_graph(zi, zj, train_cfg_.tau);
    Var term = mul(slice_cols(alpha, p, 1), per_graph);
    acc = p == 0 ? term : add(acc, term);
  }
  Var loss = mean(acc);
  const double value = loss.value().item();
  if (grad_w || grad_theta) {
    tape.run_backward(loss);
    if (grad_w) *grad_w = collect_subset(enc_bound);
    if (grad_theta) *grad_theta = collect_subset(sc_bound);
  }
  return value;
}

BilevelFuncs GpaTrainer::bilevel_funcs(std::span<const int> train_batch,
                                       std::span<const int> valid_batch, uint64_t epoch) const {
  BilevelFuncs f;
  f.grad_w_train = [this, train_batch, epoch](const ParamSet& w, const ParamSet& th) {
    GradMap g;
    hard_train_loss(train_batch, w, th, epoch, &g);
    return g;
  };
  f.valid_loss = [this, valid_batch, epoch](const ParamSet& w, const ParamSet& th,
                                            GradMap* g_theta, GradMap* g_w) {
    return soft_weighted_loss(valid_batch, w, th, epoch, g_w, g_theta);
  };
  f.grad_theta_train = [this, train_batch, epoch](const ParamSet& w, const ParamSet& th) {
    GradMap g;
    soft_weighted_loss(train_batch, w, th, epoch, nullptr, &g);
    return g;
  };
  f.grad_w_train_soft = [this, train_batch, epoch](const ParamSet& w, const ParamSet& th) {
    GradMap g;
    soft_weighted_loss(train_batch, w, th, epoch, &g, nullptr);
    return g;
  };
  return f;
}

GradMap GpaTrainer::hypergradient(const ParamSet& w, const ParamSet& theta,
                                  std::span<const int> train_batch,
                                  std::span<const int> valid_batch, uint64_t epoch,
                                  HypergradDiag* diag) const {
  return fd_hypergradient(bilevel_funcs(train_batch, valid_batch, epoch), w, theta,
                          train_cfg_.lr, train_cfg_.eps_scale, diag);
}

GradMap GpaTrainer::hypergradient_oracle(const ParamSet& w, const ParamSet& theta,
                                         std::span<const int> train_batch,
                                         std::span<const int> valid_batch, uint64_t epoch,
                                         double h) const {
  if (train_batch.size() > 10 || valid_batch.size() > 10 || enc_cfg_.hidden_dim > 16)
    throw OracleTooExpensive("oracle is restricted to toy instances");
  return gpa::hypergradient_oracle(bilevel_funcs(train_batch, valid_batch, epoch), w, theta,
                                   train_cfg_.lr, h);
}

double GpaTrainer::lower_step(TrainerState& st, std::span<const int> batch) const {
  GradMap gw;
  const double loss =
      hard_train_loss(batch, st.w, st.theta, static_cast<uint64_t>(st.epoch), &gw);
  if (train_cfg_.adam_lower)
    adam_step(st.w, gw, train_cfg_.lr, st.adam_w);
  else
    sgd_step(st.w, gw, train_cfg_.lr);
  return loss;
}

double GpaTrainer::upper_step(TrainerState& st, std::span<const int> train_batch,
                              std::span<const int> valid_batch, double* theta_grad_norm) const {
  HypergradDiag diag;
  GradMap hg = hypergradient(st.w, st.theta, train_batch, valid_batch,
                             static_cast<uint64_t>(st.epoch), &diag);
  if (theta_grad_norm) *theta_grad_norm = norm2(hg);
  if (train_cfg_.adam_upper)
    adam_step(st.theta, hg, train_cfg_.effective_upper_lr(), st.adam_theta);
  else
    sgd_step(st.theta, hg, train_cfg_.effective_upper_lr());
  return diag.valid_loss;
}

std::vector<AugPair> GpaTrainer::random_pairs(std::span<const int> batch, uint64_t epoch) const {
  std::vector<AugPair> pairs;
  pairs.reserve(batch.size());
  for (int gid : batch) pairs.push_back(draw_random_pair(train_cfg_.seed, gid, epoch));
  return pairs;
}

TrainerState GpaTrainer::run_loop(const SplitSpec& split, PairSource source,
                                  std::optional<AugPair> fixed) const {
  TrainerState st = init_state();
  const bool with_upper = source == PairSource::Selector;
  const int batch_size = train_cfg_.batch_size;
  try {
    for (int epoch = 0; epoch < train_cfg_.epochs; ++epoch) {
      st.epoch = epoch;
      std::vector<int> order = split.train_indices;
      RngStream shuffler(train_cfg_.seed, 0, static_cast<uint64_t>(epoch), slots::kTrainSampler);
      shuffler.shuffle(order);
      int step = 0;
      for (size_t pos = 0; pos < order.size(); pos += batch_size, ++step) {
        const size_t len = std::min<size_t>(batch_size, order.size() - pos);
        if (len < 2) continue;  // Eq. 4 needs a negative
        std::span<const int> batch(order.data() + pos, len);

        StepRecord rec;
        rec.epoch = epoch;
        rec.step = step;
        if (source == PairSource::Selector) {
          rec.train_loss = lower_step(st, batch);
        } else {
          std::vector<AugPair> pairs = source == PairSource::Fixed
                                           ? std::vector<AugPair>(batch.size(), *fixed)
                                           : random_pairs(batch, static_cast<uint64_t>(epoch));
          GradMap gw;
          rec.train_loss = hard_train_loss(batch, st.w, st.theta, static_cast<uint64_t>(epoch),
                                           &gw, &pairs);
          if (train_cfg_.adam_lower)
            adam_step(st.w, gw, train_cfg_.lr, st.adam_w);
          else
            sgd_step(st.w, gw, train_cfg_.lr);
        }

        if (with_upper) {
          std::vector<int> vbatch = split.valid_indices;
          RngStream vs(train_cfg_.seed, static_cast<uint64_t>(step),
                       static_cast<uint64_t>(epoch), slots::kValidSampler);
          vs.shuffle(vbatch);
          const size_t vlen = std::min<size_t>(batch_size, vbatch.size());
          if (vlen >= 2) {
            vbatch.resize(vlen);
            rec.valid_loss =
                upper_step(st, batch, std::span<const int>(vbatch), &rec.theta_grad_norm);
          }
        }
        st.history.push_back(rec);
      }
      st.epoch = epoch + 1;
    }
  } catch (const NonFiniteGradient& e) {
    st.aborted = true;
    st.abort_reason = e.what();
  }
  return st;
}

TrainerState GpaTrainer::train(const SplitSpec& split) const {
  return run_loop(split, PairSource::Selector, std::nullopt);
}

TrainerState GpaTrainer::train_random(const SplitSpec& split) const {
  return run_loop(split, PairSource::Random, std::nullopt);
}

TrainerState GpaTrainer::train_fixed_pair(const SplitSpec& split, AugPair pair) const {
  return run_loop(split, PairSource::Fixed, pair);
}

}  // namespace gpa
