#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wunet/error.hpp"

namespace wunet {

// Reverse-mode autodiff over dense row-major tensors. A Tensor is a shared
// handle to a graph node; operators build fresh nodes whose backprop closures
// accumulate gradients into their parents. Graphs are DAGs built per forward
// pass; parameter leaves persist across passes and collect gradients until
// the optimizer zeroes them.

namespace detail {

template <typename T>
struct Node {
  std::vector<int> shape;
  std::vector<T> value;
  std::vector<T> grad;  // allocated lazily; same length as value when present
  bool requires_grad = false;
  bool backward_ran = false;  // set on the root once backward() completes
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backprop;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
  bool has_grad() const { return grad.size() == value.size(); }
};

inline std::size_t shape_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension");
    n *= std::size_t(d);
  }
  return n;
}

}  // namespace detail

// Graph recording is on by default; wrap inference in NoGradGuard to skip
// building backprop closures.
inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

struct NoGradGuard {
  bool prev;
  NoGradGuard() : prev(grad_mode()) { grad_mode() = false; }
  ~NoGradGuard() { grad_mode() = prev; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};

template <typename T>
class Tensor {
 public:
  using Node = detail::Node<T>;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
    auto n = std::make_shared<Node>();
    n->value.assign(detail::shape_numel(shape), T(0));
    n->shape = std::move(shape);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor from_data(std::vector<int> shape, std::vector<T> data,
                          bool requires_grad = false) {
    if (detail::shape_numel(shape) != data.size())
      throw ShapeError("from_data: shape does not match data length");
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(data);
    n->requires_grad = requires_grad;
    return Tensor(std::move(n));
  }

  static Tensor scalar(T v) { return from_data({1}, {v}); }

  bool defined() const { return bool(n_); }
  const std::vector<int>& shape() const { return n_->shape; }
  int dim(int i) const { return n_->shape[std::size_t(i)]; }
  std::size_t numel() const { return n_->value.size(); }

  std::vector<T>& data() { return n_->value; }
  const std::vector<T>& data() const { return n_->value; }

  bool requires_grad() const { return n_ && n_->requires_grad; }
  void set_requires_grad(bool b) { n_->requires_grad = b; }

  bool has_grad() const { return n_ && n_->has_grad(); }
  std::vector<T>& grad() {
    if (!has_grad()) throw ContractError("tensor has no gradient buffer");
    return n_->grad;
  }
  const std::vector<T>& grad() const {
    if (!has_grad()) throw ContractError("tensor has no gradient buffer");
    return n_->grad;
  }
  void ensure_grad() { n_->ensure_grad(); }
  void zero_grad() {
    n_->ensure_grad();
    std::fill(n_->grad.begin(), n_->grad.end(), T(0));
  }

  T item() const {
    if (numel() != 1) throw ContractError("item() requires a single-element tensor");
    return n_->value[0];
  }

  const std::shared_ptr<Node>& node() const { return n_; }

 private:
  std::shared_ptr<Node> n_;
};

// Accumulates gradients of every reachable requires_grad tensor by reverse
// topological traversal from a scalar root. A graph can be walked once;
// rebuild the forward pass before calling backward again.
template <typename T>
inline void backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1)
    throw ContractError("backward: root must be a defined scalar");
  auto root = loss.node();
  if (root->backward_ran)
    throw ContractError("backward: already run on this graph");
  if (!root->requires_grad) {
    root->backward_ran = true;
    return;  // nothing reachable requires gradients
  }

  using NodeT = detail::Node<T>;
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> seen;
  std::vector<std::pair<NodeT*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.second < top.first->parents.size()) {
      NodeT* p = top.first->parents[top.second++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(top.first);
      stack.pop_back();
    }
  }

  root->ensure_grad();
  root->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT* n = *it;
    if (n->backprop && n->has_grad()) n->backprop();
  }
  root->backward_ran = true;
}

}  // namespace wunet
