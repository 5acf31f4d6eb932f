#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpa/rng.hpp"
#include "gpa/tape.hpp"
#include "gpa/tensor.hpp"

namespace gpa {

// Named trainable tensors with deterministic (insertion) iteration order.
class ParamSet {
 public:
  Tensor& add(const std::string& name, Tensor t);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  size_t size() const { return order_.size(); }
  const std::string& name(size_t i) const { return order_[i]; }
  Tensor& tensor(size_t i) { return tensors_[i]; }
  const Tensor& tensor(size_t i) const { return tensors_[i]; }
  int64_t total_elems() const;

  // Flat binary file: magic, version, per parameter name/shape/raw doubles.
  void save(const std::filesystem::path& path) const;
  static ParamSet load(const std::filesystem::path& path);

  // In-place w += alpha * g for every named gradient.
  void add_scaled(const std::map<std::string, Tensor>& grads, double alpha);

 private:
  std::vector<std::string> order_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, size_t> index_;
};

using GradMap = std::map<std::string, Tensor>;

double dot(const GradMap& a, const GradMap& b);
double norm2(const GradMap& g);
bool all_finite(const GradMap& g);
GradMap subtract(const GradMap& a, const GradMap& b);
GradMap scaled(const GradMap& g, double alpha);

// Glorot-style uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Tensor uniform_init(int rows, int cols, RngStream& rng);

// Leaf Var per parameter, keyed by name, in ParamSet order.
std::map<std::string, Var> bind_params(Tape& tape, const ParamSet& params);
GradMap collect_grads(const std::map<std::string, Var>& bound);

// One SGD step: w <- w - lr * g. Throws NonFiniteGradient on NaN/Inf grads.
void sgd_step(ParamSet& params, const GradMap& grads, double lr);

struct AdamState {
  std::map<std::string, std::pair<Tensor, Tensor>> moments;  // (m, v)
  long t = 0;
};

void adam_step(ParamSet& params, const GradMap& grads, double lr, AdamState& state,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Central-difference check of reverse-mode gradients. build constructs the
// scalar loss from the probed leaf; returns max over coordinates of
// |analytic - fd| / max(1, |analytic|, |fd|).
double grad_check(const std::function<Var(Tape&, Var)>& build, const Tensor& x, double h);

}  // namespace gpa
