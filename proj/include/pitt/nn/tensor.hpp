#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pitt::nn {

using Shape = std::vector<std::int64_t>;

std::int64_t numel(const Shape& s);
std::string shape_str(const Shape& s);

/// Dense row-major double array.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0);
  Tensor(Shape s, std::vector<double> values);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  std::int64_t dim(int axis) const;  // negative axes count from the back
  int rank() const { return static_cast<int>(shape.size()); }
  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  bool operator==(const Tensor&) const = default;
};

struct Node {
  Tensor value;
  std::vector<double> grad;  // empty until something flows into it
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
  bool requires_grad = false;

  std::vector<double>& ensure_grad();
};

/// Handle to a value in the dynamic autodiff graph.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape; }
  std::int64_t dim(int axis) const { return node_->value.dim(axis); }
  const std::vector<double>& grad() const { return node_->grad; }
  std::vector<double>& ensure_grad() { return node_->ensure_grad(); }
  void zero_grad() { node_->grad.clear(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Tensor t);
/// Leaf that accumulates gradients.
Var parameter(Tensor t);

/// Creates an op output. The backward closure is kept only when a parent needs gradients
/// and gradient recording is enabled.
Var make_result(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward);

/// Seeds d(loss)/d(loss) = 1 and propagates through the recorded graph.
void backward(const Var& loss);

bool grad_enabled();

/// Disables graph recording in its scope (evaluation).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

}  // namespace pitt::nn
