#pragma once

#include "gpa/ops.hpp"

namespace gpa {

// Instance-level contrastive loss. Rows of z_i and z_j are the two views of
// the same graph, aligned by row. The denominator holds the cross-view
// negatives only: for graph n it sums exp(sim(z_i^n, z_j^n'))/tau over n' != n,
// and the positive pair is excluded.
//   loss_n = -sim(z_i^n, z_j^n)/tau + log sum_{n' != n} exp(sim(z_i^n, z_j^n')/tau)

// Per-graph losses as a [B x 1] column.
Var ntxent_per_graph(Var z_i, Var z_j, double tau);

// Mean over the batch. Throws InsufficientBatch when B < 2.
Var ntxent_loss(Var z_i, Var z_j, double tau);

}  // namespace gpa
