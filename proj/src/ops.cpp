#include "gpa/ops.hpp"

#include <cmath>
#include <string>

#include "gpa/errors.hpp"

namespace gpa {
namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw std::logic_error("operands from different tapes");
}

std::string shape_str(const Tensor& t) {
  return "[" + std::to_string(t.nrows) + "x" + std::to_string(t.ncols) + "]";
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}

bool needs(const Tape& t, int id) { return t.node(id).requires_grad; }

}  // namespace

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor &A = t.val(a), &B = t.val(b);
  if (A.ncols != B.nrows) shape_error("matmul", A, B);
  Tensor out(A.nrows, B.ncols);
  for (int i = 0; i < A.nrows; ++i) {
    const double* arow = &A.values[static_cast<size_t>(i) * A.ncols];
    double* orow = &out.values[static_cast<size_t>(i) * out.ncols];
    for (int k = 0; k < A.ncols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &B.values[static_cast<size_t>(k) * B.ncols];
      for (int j = 0; j < B.ncols; ++j) orow[j] += aik * brow[j];
    }
  }
  return t.emplace(std::move(out), {a.id, b.id}, "matmul", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& g = n.grad;
    int ia = n.inputs[0], ib = n.inputs[1];
    const Tensor &A = tp.node(ia).value, &B = tp.node(ib).value;
    if (needs(tp, ia)) {
      Tensor& ga = tp.grad_buf(ia);  // g * B^T
      for (int i = 0; i < g.nrows; ++i)
        for (int j = 0; j < g.ncols; ++j) {
          const double gij = g.at(i, j);
          if (gij == 0.0) continue;
          for (int k = 0; k < A.ncols; ++k) ga.at(i, k) += gij * B.at(k, j);
        }
    }
    if (needs(tp, ib)) {
      Tensor& gb = tp.grad_buf(ib);  // A^T * g
      for (int i = 0; i < g.nrows; ++i)
        for (int k = 0; k < A.ncols; ++k) {
          const double aik = A.at(i, k);
          if (aik == 0.0) continue;
          for (int j = 0; j < g.ncols; ++j) gb.at(k, j) += aik * g.at(i, j);
        }
    }
  });
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor &A = t.val(a), &B = t.val(b);
  const bool broadcast = (B.nrows == 1 && A.ncols == B.ncols && A.nrows != 1);
  if (!A.same_shape(B) && !broadcast) shape_error("add", A, B);
  Tensor out = A;
  if (broadcast) {
    for (int i = 0; i < A.nrows; ++i)
      for (int j = 0; j < A.ncols; ++j) out.at(i, j) += B.at(0, j);
  } else {
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += B.values[i];
  }
  return t.emplace(std::move(out), {a.id, b.id}, "add", [broadcast](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& g = n.grad;
    if (needs(tp, n.inputs[0])) {
      Tensor& ga = tp.grad_buf(n.inputs[0]);
      for (size_t i = 0; i < g.values.size(); ++i) ga.values[i] += g.values[i];
    }
    if (needs(tp, n.inputs[1])) {
      Tensor& gb = tp.grad_buf(n.inputs[1]);
      if (broadcast) {
        for (int i = 0; i < g.nrows; ++i)
          for (int j = 0; j < g.ncols; ++j) gb.at(0, j) += g.at(i, j);
      } else {
        for (size_t i = 0; i < g.values.size(); ++i) gb.values[i] += g.values[i];
      }
    }
  });
}

Var sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor &A = t.val(a), &B = t.val(b);
  if (!A.same_shape(B)) shape_error("mul", A, B);
  Tensor out = A;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] *= B.values[i];
  return t.emplace(std::move(out), {a.id, b.id}, "mul", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& g = n.grad;
    const Tensor &A = tp.node(n.inputs[0]).value, &B = tp.node(n.inputs[1]).value;
    if (needs(tp, n.inputs[0])) {
      Tensor& ga = tp.grad_buf(n.inputs[0]);
      for (size_t i = 0; i < g.values.size(); ++i) ga.values[i] += g.values[i] * B.values[i];
    }
    if (needs(tp, n.inputs[1])) {
      Tensor& gb = tp.grad_buf(n.inputs[1]);
      for (size_t i = 0; i < g.values.size(); ++i) gb.values[i] += g.values[i] * A.values[i];
    }
  });
}

Var scale(Var a, double c) {
  Tape& t = *a.tape;
  Tensor out = t.val(a);
  for (double& x : out.values) x *= c;
  return t.emplace(std::move(out), {a.id}, "scale", [c](Tape& tp, int self) {
    const auto& n = tp.node(self);
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (size_t i = 0; i < n.grad.values.size(); ++i) ga.values[i] += c * n.grad.values[i];
  });
}

Var relu(Var a) {
  Tape& t = *a.tape;
  Tensor out = t.val(a);
  for (double& x : out.values) x = x > 0.0 ? x : 0.0;
  return t.emplace(std::move(out), {a.id}, "relu", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& x = tp.node(n.inputs[0]).value;
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (size_t i = 0; i < x.values.size(); ++i)
      if (x.values[i] > 0.0) ga.values[i] += n.grad.values[i];
  });
}

Var exp(Var a) {
  Tape& t = *a.tape;
  Tensor out = t.val(a);
  for (double& x : out.values) x = std::exp(x);
  return t.emplace(std::move(out), {a.id}, "exp", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (size_t i = 0; i < n.grad.values.size(); ++i)
      ga.values[i] += n.grad.values[i] * n.value.values[i];
  });
}

Var log(Var a) {
  Tape& t = *a.tape;
  Tensor out = t.val(a);
  for (double& x : out.values) x = std::log(x);
  return t.emplace(std::move(out), {a.id}, "log", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& x = tp.node(n.inputs[0]).value;
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (size_t i = 0; i < n.grad.values.size(); ++i)
      ga.values[i] += n.grad.values[i] / x.values[i];
  });
}

Var mean(Var a) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  double s = 0.0;
  for (double x : A.values) s += x;
  const double inv = A.numel() ? 1.0 / static_cast<double>(A.numel()) : 0.0;
  return t.emplace(Tensor::scalar(s * inv), {a.id}, "mean", [inv](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const double go = n.grad.values[0] * inv;
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (double& x : ga.values) x += go;
  });
}

Var sum(Var a) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  double s = 0.0;
  for (double x : A.values) s += x;
  return t.emplace(Tensor::scalar(s), {a.id}, "sum", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const double go = n.grad.values[0];
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (double& x : ga.values) x += go;
  });
}

Var row_sum(Var a) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  Tensor out(A.nrows, 1);
  for (int i = 0; i < A.nrows; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.ncols; ++j) s += A.at(i, j);
    out.at(i, 0) = s;
  }
  return t.emplace(std::move(out), {a.id}, "row_sum", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (int i = 0; i < ga.nrows; ++i) {
      const double gi = n.grad.at(i, 0);
      for (int j = 0; j < ga.ncols; ++j) ga.at(i, j) += gi;
    }
  });
}

Var row_softmax(Var a) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  Tensor out(A.nrows, A.ncols);
  for (int i = 0; i < A.nrows; ++i) {
    double mx = -1e300;
    for (int j = 0; j < A.ncols; ++j) mx = std::max(mx, A.at(i, j));
    double z = 0.0;
    for (int j = 0; j < A.ncols; ++j) z += std::exp(A.at(i, j) - mx);
    for (int j = 0; j < A.ncols; ++j) out.at(i, j) = std::exp(A.at(i, j) - mx) / z;
  }
  return t.emplace(std::move(out), {a.id}, "row_softmax", [](Tape& tp, int self) {
    const auto& n = tp.node(self);
    const Tensor& y = n.value;
    const Tensor& g = n.grad;
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (int i = 0; i < y.nrows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < y.ncols; ++j) dot += g.at(i, j) * y.at(i, j);
      for (int j = 0; j < y.ncols; ++j) ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw std::logic_error("concat_rows of nothing");
  Tape& t = *parts[0].tape;
  const int n = t.val(parts[0]).nrows;
  int width = 0;
  std::vector<int> ids;
  std::vector<int> offsets;
  for (Var p : parts) {
    check_same_tape(parts[0], p);
    const Tensor& P = t.val(p);
    if (P.nrows != n) shape_error("concat_rows", t.val(parts[0]), P);
    ids.push_back(p.id);
    offsets.push_back(width);
    width += P.ncols;
  }
  Tensor out(n, width);
  for (size_t k = 0; k < ids.size(); ++k) {
    const Tensor& P = t.node(ids[k]).value;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < P.ncols; ++j) out.at(i, offsets[k] + j) = P.at(i, j);
  }
  return t.emplace(std::move(out), ids, "concat_rows", [offsets](Tape& tp, int self) {
    const auto& n = tp.node(self);
    for (size_t k = 0; k < n.inputs.size(); ++k) {
      if (!needs(tp, n.inputs[k])) continue;
      Tensor& gp = tp.grad_buf(n.inputs[k]);
      for (int i = 0; i < gp.nrows; ++i)
        for (int j = 0; j < gp.ncols; ++j) gp.at(i, j) += n.grad.at(i, offsets[k] + j);
    }
  });
}

Var concat_rows(Var a, Var b) {
  const Var parts[2] = {a, b};
  return concat_rows(std::span<const Var>(parts, 2));
}

Var slice_cols(Var a, int start, int len) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  if (start < 0 || len < 0 || start + len > A.ncols)
    throw ShapeError("slice_cols out of range");
  Tensor out(A.nrows, len);
  for (int i = 0; i < A.nrows; ++i)
    for (int j = 0; j < len; ++j) out.at(i, j) = A.at(i, start + j);
  return t.emplace(std::move(out), {a.id}, "slice_cols", [start, len](Tape& tp, int self) {
    const auto& n = tp.node(self);
    Tensor& ga = tp.grad_buf(n.inputs[0]);
    for (int i = 0; i < n.grad.nrows; ++i)
      for (int j = 0; j < len; ++j) ga.at(i, start + j) += n.grad.at(i, j);
  });
}

Var segment_sum(Var a, const std::vector<int>& segment_ids, int num_segments) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  if (static_cast<int>(segment_ids.size()) != A.nrows)
    throw ShapeError("segment_sum: one id per row required");
  Tensor out(num_segments, A.ncols);
  for (int i = 0; i < A.nrows; ++i) {
    const int s = segment_ids[i];
    if (s < 0 || s >= num_segments) throw ShapeError("segment_sum: id out of range");
    for (int j = 0; j < A.ncols; ++j) out.at(s, j) += A.at(i, j);
  }
  return t.emplace(std::move(out), {a.id}, "segment_sum",
                   [ids = segment_ids](Tape& tp, int self) {
                     const auto& n = tp.node(self);
                     Tensor& ga = tp.grad_buf(n.inputs[0]);
                     for (int i = 0; i < ga.nrows; ++i)
                       for (int j = 0; j < ga.ncols; ++j) ga.at(i, j) += n.grad.at(ids[i], j);
                   });
}

Var gather_rows(Var a, const std::vector<int>& row_ids) {
  Tape& t = *a.tape;
  const Tensor& A = t.val(a);
  Tensor out(static_cast<int>(row_ids.size()), A.ncols);
  for (size_t k = 0; k < row_ids.size(); ++k) {
    const int r = row_ids[k];
    if (r < 0 || r >= A.nrows) throw ShapeError("gather_rows: id out of range");
    for (int j = 0; j < A.ncols; ++j) out.at(static_cast<int>(k), j) = A.at(r, j);
  }
  return t.emplace(std::move(out), {a.id}, "gather_rows",
                   [ids = row_ids](Tape& tp, int self) {
                     const auto& n = tp.node(self);
                     Tensor& ga = tp.grad_buf(n.inputs[0]);
                     for (size_t k = 0; k < ids.size(); ++k)
                       for (int j = 0; j < ga.ncols; ++j)
                         ga.at(ids[k], j) += n.grad.at(static_cast<int>(k), j);
                   });
}

Var cosine_similarity(Var a, Var b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Tensor &A = t.val(a), &B = t.val(b);
  if (A.ncols != B.ncols) shape_error("cosine_similarity", A, B);
  auto normalize = [](const Tensor& X, std::vector<double>& norms) {
    Tensor N(X.nrows, X.ncols);
    norms.resize(X.nrows);
    for (int i = 0; i < X.nrows; ++i) {
      double s = 0.0;
      for (int j = 0; j < X.ncols; ++j) s += X.at(i, j) * X.at(i, j);
      const double nrm = std::sqrt(s);
      if (nrm < 1e-300) throw ZeroNormError("cosine_similarity: zero-norm row");
      norms[i] = nrm;
      for (int j = 0; j < X.ncols; ++j) N.at(i, j) = X.at(i, j) / nrm;
    }
    return N;
  };
  std::vector<double> norm_a, norm_b;
  Tensor Na = normalize(A, norm_a);
  Tensor Nb = normalize(B, norm_b);
  Tensor out(A.nrows, B.nrows);
  for (int i = 0; i < A.nrows; ++i)
    for (int m = 0; m < B.nrows; ++m) {
      double s = 0.0;
      for (int j = 0; j < A.ncols; ++j) s += Na.at(i, j) * Nb.at(m, j);
      out.at(i, m) = s;
    }
  // d cos(u, v)/du = (v_hat - cos * u_hat) / |u|, symmetrically for v.
  return t.emplace(std::move(out), {a.id, b.id}, "cosine_similarity",
                   [Na = std::move(Na), Nb = std::move(Nb), norm_a = std::move(norm_a),
                    norm_b = std::move(norm_b)](Tape& tp, int self) {
                     const auto& n = tp.node(self);
                     const Tensor& S = n.value;
                     const Tensor& g = n.grad;
                     const int D = Na.ncols;
                     if (needs(tp, n.inputs[0])) {
                       Tensor& ga = tp.grad_buf(n.inputs[0]);
                       for (int i = 0; i < S.nrows; ++i)
                         for (int m = 0; m < S.ncols; ++m) {
                           const double gim = g.at(i, m);
                           if (gim == 0.0) continue;
                           const double c = gim / norm_a[i];
                           for (int j = 0; j < D; ++j)
                             ga.at(i, j) += c * (Nb.at(m, j) - S.at(i, m) * Na.at(i, j));
                         }
                     }
                     if (needs(tp, n.inputs[1])) {
                       Tensor& gb = tp.grad_buf(n.inputs[1]);
                       for (int i = 0; i < S.nrows; ++i)
                         for (int m = 0; m < S.ncols; ++m) {
                           const double gim = g.at(i, m);
                           if (gim == 0.0) continue;
                           const double c = gim / norm_b[m];
                           for (int j = 0; j < D; ++j)
                             gb.at(m, j) += c * (Na.at(i, j) - S.at(i, m) * Nb.at(m, j));
                         }
                     }
                   });
}

}  // namespace gpa
