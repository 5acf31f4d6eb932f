#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "gpa/errors.hpp"

namespace gpa {

// Dense row-major matrix of doubles. Every tensor in this project is 2-D;
// scalars are [1 x 1] and column vectors [n x 1].
struct Tensor {
  int nrows = 0;
  int ncols = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(int r, int c) : nrows(r), ncols(c), values(static_cast<size_t>(r) * c, 0.0) {}
  Tensor(int r, int c, std::vector<double> v) : nrows(r), ncols(c), values(std::move(v)) {
    if (static_cast<size_t>(r) * c != values.size()) throw ShapeError("tensor init size mismatch");
  }

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor scalar(double x) {
    Tensor t(1, 1);
    t.values[0] = x;
    return t;
  }
  static Tensor row(std::initializer_list<double> xs) {
    Tensor t(1, static_cast<int>(xs.size()));
    int j = 0;
    for (double x : xs) t.values[j++] = x;
    return t;
  }
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows.begin()->size()) : 0;
    Tensor t(r, c);
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != c) throw ShapeError("ragged rows");
      int j = 0;
      for (double x : row) t.at(i, j++) = x;
      ++i;
    }
    return t;
  }

  int64_t numel() const { return static_cast<int64_t>(nrows) * ncols; }
  bool same_shape(const Tensor& o) const { return nrows == o.nrows && ncols == o.ncols; }
  bool is_scalar() const { return nrows == 1 && ncols == 1; }

  double& at(int r, int c) { return values[static_cast<size_t>(r) * ncols + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * ncols + c]; }

  double item() const {
    if (!is_scalar()) throw ShapeError("item() on non-scalar");
    return values[0];
  }
};

}  // namespace gpa
