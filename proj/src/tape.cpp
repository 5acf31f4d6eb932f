#include "gpa/tape.hpp"

#include <stdexcept>

#include "gpa/errors.hpp"

namespace gpa {

const Tensor& Var::value() const { return tape->val(*this); }

Var Tape::constant(Tensor v) {
  if (backward_done_) throw std::logic_error("tape already consumed by backward; reset() first");
  nodes_.push_back(Node{std::move(v), Tensor(), {}, nullptr, false, "const"});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Tensor v) {
  if (backward_done_) throw std::logic_error("tape already consumed by backward; reset() first");
  nodes_.push_back(Node{std::move(v), Tensor(), {}, nullptr, true, "leaf"});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::emplace(Tensor value, std::vector<int> inputs, const char* op,
                  std::function<void(Tape&, int)> backward) {
  if (backward_done_) throw std::logic_error("tape already consumed by backward; reset() first");
  bool rg = false;
  for (int i : inputs) rg = rg || nodes_[i].requires_grad;
  nodes_.push_back(Node{std::move(value), Tensor(), std::move(inputs),
                        rg ? std::move(backward) : nullptr, rg, op});
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.numel() == 0) return Tensor(n.value.nrows, n.value.ncols);
  return n.grad;
}

Tensor& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (n.grad.numel() == 0) n.grad = Tensor(n.value.nrows, n.value.ncols);
  return n.grad;
}

void Tape::run_backward(Var loss) {
  if (loss.tape != this) throw std::logic_error("loss from another tape");
  if (backward_done_) throw std::logic_error("backward already ran; reset() first");
  if (!nodes_[loss.id].value.is_scalar()) throw NonScalarLoss("backward target must be scalar");
  backward_done_ = true;
  grad_buf(loss.id).values[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.numel() == 0) continue;
    n.backward(*this, id);
  }
}

void Tape::reset() {
  nodes_.clear();
  backward_done_ = false;
}

}  // namespace gpa
