#pragma once

#include <functional>

#include "gpa/params.hpp"

namespace gpa {

// Callbacks defining one bi-level problem instance. The train loss enters in
// two forms: the hard form drives the virtual one-step update of w, and the
// soft (score-weighted) form supplies the theta- and w-gradients that make
// the mixed second-derivative term non-vanishing.
struct BilevelFuncs {
  // d/dw of the hard train loss at (w, theta); defines w' = w - xi * g.
  std::function<GradMap(const ParamSet& w, const ParamSet& theta)> grad_w_train;
  // Validation loss at (w, theta); fills d/dtheta and d/dw from one backward.
  std::function<double(const ParamSet& w, const ParamSet& theta, GradMap* g_theta,
                       GradMap* g_w)>
      valid_loss;
  // d/dtheta of the soft train loss at arbitrary w.
  std::function<GradMap(const ParamSet& w, const ParamSet& theta)> grad_theta_train;
  // d/dw of the soft train loss (used by the oracle only).
  std::function<GradMap(const ParamSet& w, const ParamSet& theta)> grad_w_train_soft;
};

struct HypergradDiag {
  double valid_loss = 0.0;
  double v_norm = 0.0;       // |d valid/dw'|
  double epsilon = 0.0;      // eps_scale / v_norm
  bool correction_skipped = false;
};

// Finite-difference hypergradient:
//   w'  = w - xi * grad_w_train(w, theta)
//   v   = d valid(w', theta)/dw',  eps = eps_scale / |v|
//   out = d valid(w', theta)/dtheta
//         - xi * [g_theta_train(w + eps v) - g_theta_train(w - eps v)] / (2 eps)
// When |v| < 1e-12 the correction is skipped and the direct term returned.
GradMap fd_hypergradient(const BilevelFuncs& f, const ParamSet& w, const ParamSet& theta,
                         double xi, double eps_scale, HypergradDiag* diag = nullptr);

// Independent route to the same quantity: differentiates the one-step update
// exactly, obtaining the mixed term from central differences of
// grad_w_train_soft . v over each theta coordinate (step h). Cost scales with
// |theta|; refuses instances beyond max_theta_elems.
GradMap hypergradient_oracle(const BilevelFuncs& f, const ParamSet& w, const ParamSet& theta,
                             double xi, double h = 1e-6, int64_t max_theta_elems = 4000,
                             HypergradDiag* diag = nullptr);

}  // namespace gpa
