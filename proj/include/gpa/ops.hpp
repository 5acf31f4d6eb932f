#pragma once

#include <span>
#include <vector>

#include "gpa/tape.hpp"

namespace gpa {

// Differentiable primitives. All record a node on the operands' tape.
Var matmul(Var a, Var b);                    // [N x K] * [K x M]
Var add(Var a, Var b);                       // same shape, or b = [1 x M] row broadcast
Var sub(Var a, Var b);
Var mul(Var a, Var b);                       // elementwise
Var scale(Var a, double c);
Var relu(Var a);
Var exp(Var a);
Var log(Var a);
Var mean(Var a);                             // -> [1 x 1]
Var sum(Var a);                              // -> [1 x 1]
Var row_sum(Var a);                          // [N x D] -> [N x 1]
Var row_softmax(Var a);                      // max-shifted, per row
Var concat_rows(std::span<const Var> parts); // row-wise concat -> [N x sum(D_i)]
Var concat_rows(Var a, Var b);
Var slice_cols(Var a, int start, int len);   // [N x D] -> [N x len]

// Row r of the output is the sum of input rows with segment_ids == r.
// Empty segments produce zero rows.
Var segment_sum(Var a, const std::vector<int>& segment_ids, int num_segments);
Var gather_rows(Var a, const std::vector<int>& row_ids);

// Pairwise cosine similarity: out[n, m] = cos(a_n, b_m); [N x D],[M x D] -> [N x M].
// Throws ZeroNormError on a zero-norm row.
Var cosine_similarity(Var a, Var b);

}  // namespace gpa
