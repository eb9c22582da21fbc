#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lite/errors.hpp"

namespace lite {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace ad {

struct Node {
  Shape shape;
  std::vector<double> value;
  bool requires_grad = false;
  bool retain_grad = false;
  bool is_leaf = true;
};

// Dense row-major float64 tensor. Copies share storage (handle semantics), so a
// tensor recorded on a tape stays alive as long as the tape needs it.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->value.size(); }
  // 2-D accessors; rank-1 tensors behave as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const { return node_->value; }
  std::span<double> mutable_data() { return node_->value; }
  double operator[](std::size_t i) const { return node_->value[i]; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool on);
  // Keep this tensor's gradient in the map returned by Tape::backward even if
  // it is an interior node.
  Tensor& retain_grad();
  bool is_leaf() const { return node_->is_leaf; }

  // New leaf sharing no storage with this tensor.
  Tensor clone() const;
  // Leaf copy cut from any recorded history.
  Tensor detach() const;

  const Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  friend class Tape;
  friend Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad);

  std::shared_ptr<Node> node_;
};

// Interior result of an op; requires_grad marks it as taped (non-leaf).
Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad);

class Tape;

// Gradients produced by one reverse sweep: requires_grad leaves plus any
// tensor flagged retain_grad.
class GradientMap {
 public:
  bool contains(const Tensor& t) const { return grads_.contains(t.node()); }
  // Throws ContractError when the tensor did not receive a gradient.
  std::span<const double> at(const Tensor& t) const;
  // Zero-filled when the tensor did not participate.
  std::vector<double> get_or_zero(const Tensor& t) const;
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Tape;
  std::unordered_map<const Node*, std::vector<double>> grads_;
};

// Define-by-run record of differentiable ops. Entries are appended in
// execution order, which is a topological order, so the reverse sweep walks
// them back to front. A tape supports exactly one backward pass.
class Tape {
 public:
  // Receives d(loss)/d(output) and accumulates into the inputs via accumulate().
  using BackwardFn = std::function<void(std::span<const double> grad_out, Tape& tape)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(const Tensor& output, BackwardFn fn);
  // Adds g into the pending gradient of t; ignored for tensors without requires_grad.
  void accumulate(const Tensor& t, std::span<const double> g);
  // Adds g[i] into element `index` of the pending gradient.
  void accumulate_at(const Tensor& t, std::size_t index, double g);
  // Mutable gradient buffer for t (zero-initialized), or empty span if t needs none.
  std::span<double> grad_buffer(const Tensor& t);

  GradientMap backward(const Tensor& loss);

  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

 private:
  struct Entry {
    std::shared_ptr<Node> output;
    BackwardFn backward;
  };

  std::vector<Entry> entries_;
  std::unordered_map<const Node*, std::vector<double>> pending_;
  std::vector<std::shared_ptr<Node>> leaves_;
  bool consumed_ = false;
};

// Installs `tape` as the calling thread's recording tape for the scope's lifetime.
// Ops run with no active tape (or with no requires_grad input) record nothing.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

}  // namespace ad
}  // namespace lite
