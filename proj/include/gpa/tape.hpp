#pragma once

#include <functional>
#include <vector>

#include "gpa/tensor.hpp"

namespace gpa {

class Tape;

// Handle to a tape node. Cheap to copy; only meaningful while its tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr && id >= 0; }
  const Tensor& value() const;
};

// Append-only record of the forward computation. Node ids are topologically
// ordered by construction; run_backward walks them once in reverse.
class Tape {
 public:
  struct Node {
    Tensor value;
    Tensor grad;  // empty until touched by backward
    std::vector<int> inputs;
    std::function<void(Tape&, int)> backward;  // null for leaves/constants
    bool requires_grad = false;
    const char* op = "leaf";
  };

  Var constant(Tensor v);  // no gradient tracking
  Var leaf(Tensor v);      // gradient target (parameters, probed inputs)
  Var emplace(Tensor value, std::vector<int> inputs, const char* op,
              std::function<void(Tape&, int)> backward);

  const Tensor& val(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  // Gradient of the last run_backward target w.r.t. v (zeros if untouched).
  Tensor grad(Var v) const;

  void run_backward(Var loss);
  void reset();
  size_t size() const { return nodes_.size(); }

  Tensor& grad_buf(int id);
  const Node& node(int id) const { return nodes_[id]; }

 private:
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace gpa
