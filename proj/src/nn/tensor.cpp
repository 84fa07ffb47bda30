#include "pitt/nn/tensor.hpp"

#include <stdexcept>
#include <unordered_set>

namespace pitt::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

std::int64_t numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) {
    if (d < 0) throw std::invalid_argument("tensor: negative dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "]";
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(static_cast<std::size_t>(numel(shape)), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  if (numel(shape) != static_cast<std::int64_t>(data.size())) {
    throw std::invalid_argument("tensor: " + std::to_string(data.size()) + " values for shape " + shape_str(shape));
  }
}

std::int64_t Tensor::dim(int axis) const {
  const int r = rank();
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) throw std::out_of_range("tensor: axis out of range for shape " + shape_str(shape));
  return shape[static_cast<std::size_t>(axis)];
}

std::vector<double>& Node::ensure_grad() {
  if (grad.empty()) grad.assign(value.data.size(), 0.0);
  return grad;
}

Var constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  return Var(std::move(n));
}

Var parameter(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = true;
  return Var(std::move(n));
}

Var make_result(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward_fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  if (g_grad_enabled) {
    for (const auto& p : parents) n->requires_grad = n->requires_grad || p.requires_grad();
  }
  if (n->requires_grad) {
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward = std::move(backward_fn);
  }
  return Var(std::move(n));
}

void backward(const Var& loss) {
  if (!loss.requires_grad()) throw std::logic_error("backward: loss does not depend on any parameter");
  if (loss.value().size() != 1) throw std::logic_error("backward: loss must be a scalar");
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node().get(), 0}};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

}  // namespace pitt::nn
