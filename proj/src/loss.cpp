#include "gpa/loss.hpp"

#include "gpa/errors.hpp"

namespace gpa {

Var ntxent_per_graph(Var z_i, Var z_j, double tau) {
  Tape& t = *z_i.tape;
  const int b = t.val(z_i).nrows;
  if (b < 2) throw InsufficientBatch("ntxent needs at least one negative (B >= 2)");
  if (t.val(z_j).nrows != b) throw ShapeError("ntxent: view batches differ in size");
  if (tau <= 0.0) throw std::invalid_argument("temperature must be positive");

  Var sims = scale(cosine_similarity(z_i, z_j), 1.0 / tau);  // [B x B]
  Tensor eye(b, b), off(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      eye.at(i, j) = i == j ? 1.0 : 0.0;
      off.at(i, j) = i == j ? 0.0 : 1.0;
    }
  Var positives = row_sum(mul(sims, t.constant(eye)));                 // [B x 1]
  Var negatives = log(row_sum(mul(exp(sims), t.constant(off))));      // [B x 1]
  return sub(negatives, positives);
}

Var ntxent_loss(Var z_i, Var z_j, double tau) { return mean(ntxent_per_graph(z_i, z_j, tau)); }

}  // namespace gpa
