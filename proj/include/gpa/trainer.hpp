#pragma once

#include <optional>
#include <span>
#include <string>

#include "gpa/bilevel.hpp"
#include "gpa/loss.hpp"
#include "gpa/selector.hpp"

namespace gpa {

struct TrainConfig {
  int batch_size = 128;
  double lr = 1e-3;        // xi: lower-level rate and the virtual-step size
  double upper_lr = -1.0;  // theta rate; defaults to lr when negative
  double tau = 0.2;
  int epochs = 20;
  double eps_scale = 0.01;
  uint64_t seed = 1;
  bool adam_lower = true;  // plain SGD when false
  bool adam_upper = true;

  double effective_upper_lr() const { return upper_lr < 0 ? lr : upper_lr; }
};

struct StepRecord {
  int epoch = 0;
  int step = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double theta_grad_norm = 0.0;
};

struct TrainerState {
  ParamSet w;      // encoder + projection head
  ParamSet theta;  // score net
  AdamState adam_w, adam_theta;
  int epoch = 0;
  std::vector<StepRecord> history;
  bool aborted = false;
  std::string abort_reason;
};

// Alternating bi-level training of the GCL encoder (lower level, Eq.-6 style
// updates on the selector's argmax pairs) and the augmentation selector
// (upper level, finite-difference hypergradient on the validation batch).
class GpaTrainer {
 public:
  GpaTrainer(const GraphDataset& ds, EncoderConfig enc_cfg, ScoreNetConfig sel_cfg,
             AugConfig aug_cfg, TrainConfig train_cfg);

  TrainerState init_state() const;

  // Argmax pairs from the current selector; selection only, no gradients.
  std::vector<AugPair> infer_pairs(std::span<const int> batch, const ParamSet& w,
                                   const ParamSet& theta, uint64_t epoch) const;

  // Contrastive loss on the two view batches built from the selected (or
  // forced) pairs; optionally its w-gradient. Theta enters through selection
  // only, so it carries no gradient here.
  double hard_train_loss(std::span<const int> batch, const ParamSet& w, const ParamSet& theta,
                         uint64_t epoch, GradMap* grad_w = nullptr,
                         const std::vector<AugPair>* forced_pairs = nullptr) const;

  // Score-weighted objective: for every pair, the whole batch is augmented
  // under that pair and each graph's per-pair loss is weighted by its alpha
  // entry; gradients flow through both w and theta. alpha_override replaces
  // the on-tape scores with a constant matrix (tests).
  double soft_weighted_loss(std::span<const int> batch, const ParamSet& w, const ParamSet& theta,
                            uint64_t epoch, GradMap* grad_w = nullptr,
                            GradMap* grad_theta = nullptr,
                            const Tensor* alpha_override = nullptr) const;

  BilevelFuncs bilevel_funcs(std::span<const int> train_batch, std::span<const int> valid_batch,
                             uint64_t epoch) const;

  GradMap hypergradient(const ParamSet& w, const ParamSet& theta,
                        std::span<const int> train_batch, std::span<const int> valid_batch,
                        uint64_t epoch, HypergradDiag* diag = nullptr) const;
  GradMap hypergradient_oracle(const ParamSet& w, const ParamSet& theta,
                               std::span<const int> train_batch,
                               std::span<const int> valid_batch, uint64_t epoch,
                               double h = 1e-6) const;

  // One optimizer step on w (theta frozen); returns the batch loss.
  double lower_step(TrainerState& st, std::span<const int> batch) const;
  // One optimizer step on theta (w untouched); returns the validation loss.
  double upper_step(TrainerState& st, std::span<const int> train_batch,
                    std::span<const int> valid_batch, double* theta_grad_norm = nullptr) const;

  TrainerState train(const SplitSpec& split) const;

  // GPA-random ablation: uniform random pair per graph per epoch, no theta.
  TrainerState train_random(const SplitSpec& split) const;

  // Plain contrastive training with one fixed pair for every graph.
  TrainerState train_fixed_pair(const SplitSpec& split, AugPair pair) const;

  const TrainConfig& train_config() const { return train_cfg_; }
  const EncoderConfig& encoder_config() const { return enc_cfg_; }
  const AugConfig& aug_config() const { return aug_cfg_; }
  const GraphDataset& dataset() const { return *ds_; }

 private:
  enum class PairSource { Selector, Random, Fixed };
  TrainerState run_loop(const SplitSpec& split, PairSource source,
                        std::optional<AugPair> fixed) const;
  std::vector<AugPair> random_pairs(std::span<const int> batch, uint64_t epoch) const;

  const GraphDataset* ds_;
  EncoderConfig enc_cfg_;
  ScoreNetConfig sel_cfg_;
  AugConfig aug_cfg_;
  TrainConfig train_cfg_;
};

// Uniform random pair for (seed, graph_id, epoch); the ablation's selector.
AugPair draw_random_pair(uint64_t seed, int graph_id, uint64_t epoch);

}  // namespace gpa
