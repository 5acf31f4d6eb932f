#pragma once

// Independent reference implementations used as test oracles. These must not
// share code with the library paths they check.

#include <cmath>

#include "gpa/bilevel.hpp"
#include "gpa/tensor.hpp"

namespace gpa::testing {

// Direct double-loop transcription of the instance-level contrastive loss:
// mean over n of -log( exp(cos(zi_n, zj_n)/tau) / sum_{m != n} exp(cos(zi_n, zj_m)/tau) ).
inline double ntxent_reference(const gpa::Tensor& zi, const gpa::Tensor& zj, double tau) {
  auto cosine = [](const gpa::Tensor& a, int ra, const gpa::Tensor& b, int rb) {
    double d = 0, na = 0, nb = 0;
    for (int j = 0; j < a.ncols; ++j) {
      d += a.at(ra, j) * b.at(rb, j);
      na += a.at(ra, j) * a.at(ra, j);
      nb += b.at(rb, j) * b.at(rb, j);
    }
    return d / (std::sqrt(na) * std::sqrt(nb));
  };
  const int n = zi.nrows;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int m = 0; m < n; ++m)
      if (m != i) denom += std::exp(cosine(zi, i, zj, m) / tau);
    total += -std::log(std::exp(cosine(zi, i, zj, i) / tau) / denom);
  }
  return total / n;
}

// Analytic bi-level stub: L_train = 1/2 (w - theta)^2, L_valid = 1/2 w'^2.
// Exact hypergradient at (w, theta) is xi * (w - xi*(w - theta)).
inline gpa::BilevelFuncs quadratic_stub() {
  using gpa::GradMap;
  using gpa::ParamSet;
  using gpa::Tensor;
  gpa::BilevelFuncs f;
  f.grad_w_train = [](const ParamSet& w, const ParamSet& th) {
    GradMap g;
    g["w"] = Tensor::scalar(w.at("w").item() - th.at("theta").item());
    return g;
  };
  f.valid_loss = [](const ParamSet& w, const ParamSet&, GradMap* g_theta, GradMap* g_w) {
    if (g_theta) (*g_theta)["theta"] = Tensor::scalar(0.0);
    if (g_w) (*g_w)["w"] = Tensor::scalar(w.at("w").item());
    return 0.5 * w.at("w").item() * w.at("w").item();
  };
  f.grad_theta_train = [](const ParamSet& w, const ParamSet& th) {
    GradMap g;
    g["theta"] = Tensor::scalar(th.at("theta").item() - w.at("w").item());
    return g;
  };
  f.grad_w_train_soft = f.grad_w_train;
  return f;
}

inline gpa::ParamSet scalar_params(const std::string& name, double value) {
  gpa::ParamSet ps;
  ps.add(name, gpa::Tensor::scalar(value));
  return ps;
}

inline double grad_rel_err(const gpa::GradMap& a, const gpa::GradMap& b) {
  return gpa::norm2(gpa::subtract(a, b)) / (gpa::norm2(b) + 1e-12);
}

}  // namespace gpa::testing
