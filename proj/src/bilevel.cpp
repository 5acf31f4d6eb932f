#include "gpa/bilevel.hpp"

#include "gpa/errors.hpp"

namespace gpa {

GradMap fd_hypergradient(const BilevelFuncs& f, const ParamSet& w, const ParamSet& theta,
                         double xi, double eps_scale, HypergradDiag* diag) {
  GradMap gw = f.grad_w_train(w, theta);
  ParamSet w_prime = w;
  w_prime.add_scaled(gw, -xi);

  GradMap direct, v;
  const double vloss = f.valid_loss(w_prime, theta, &direct, &v);
  const double v_norm = norm2(v);
  if (diag) {
    diag->valid_loss = vloss;
    diag->v_norm = v_norm;
    diag->correction_skipped = false;
    diag->epsilon = 0.0;
  }
  if (v_norm < 1e-12) {
    if (diag) diag->correction_skipped = true;
    return direct;
  }
  const double eps = eps_scale / v_norm;
  if (diag) diag->epsilon = eps;

  ParamSet w_plus = w, w_minus = w;
  w_plus.add_scaled(v, eps);
  w_minus.add_scaled(v, -eps);
  GradMap gp = f.grad_theta_train(w_plus, theta);
  GradMap gm = f.grad_theta_train(w_minus, theta);
  GradMap correction = scaled(subtract(gp, gm), xi / (2.0 * eps));
  return subtract(direct, correction);
}

GradMap hypergradient_oracle(const BilevelFuncs& f, const ParamSet& w, const ParamSet& theta,
                             double xi, double h, int64_t max_theta_elems, HypergradDiag* diag) {
  if (theta.total_elems() > max_theta_elems)
    throw OracleTooExpensive("theta has " + std::to_string(theta.total_elems()) +
                             " elements; oracle limit is " + std::to_string(max_theta_elems));
  GradMap gw = f.grad_w_train(w, theta);
  ParamSet w_prime = w;
  w_prime.add_scaled(gw, -xi);

  GradMap direct, v;
  const double vloss = f.valid_loss(w_prime, theta, &direct, &v);
  if (diag) {
    diag->valid_loss = vloss;
    diag->v_norm = norm2(v);
  }

  // Mixed term, one theta coordinate at a time:
  //   [d^2 L/dtheta dw . v]_k = d/dtheta_k ( grad_w_train_soft(w, theta) . v )
  GradMap result = direct;
  ParamSet probe = theta;
  for (size_t pi = 0; pi < theta.size(); ++pi) {
    const std::string& name = theta.name(pi);
    Tensor& pt = probe.at(name);
    const Tensor& base = theta.at(name);
    Tensor& out = result.at(name);
    for (size_t k = 0; k < pt.values.size(); ++k) {
      pt.values[k] = base.values[k] + h;
      const double sp = dot(f.grad_w_train_soft(w, probe), v);
      pt.values[k] = base.values[k] - h;
      const double sm = dot(f.grad_w_train_soft(w, probe), v);
      pt.values[k] = base.values[k];
      out.values[k] -= xi * (sp - sm) / (2.0 * h);
    }
  }
  return result;
}

}  // namespace gpa
