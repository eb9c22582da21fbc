#include "lite/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>

namespace lite {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace ad {

namespace {

thread_local Tape* g_active_tape = nullptr;

std::shared_ptr<Node> new_node(Shape shape, std::vector<double> values, bool requires_grad) {
  for (std::size_t d : shape)
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  if (shape_numel(shape) != values.size())
    throw ShapeError("tensor of shape " + shape_str(shape) + " cannot hold " +
                     std::to_string(values.size()) + " values");
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return node;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, fill), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(new_node(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) { return from({1}, {v}, requires_grad); }

std::size_t Tensor::rows() const {
  if (rank() == 1) return 1;
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_str(shape()));
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() == 1) return node_->shape[0];
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_str(shape()));
  return node_->shape[1];
}

double Tensor::item() const {
  if (numel() != 1) throw ContractError("item() on tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

Tensor& Tensor::set_requires_grad(bool on) {
  if (!node_->is_leaf) throw ContractError("requires_grad can only be toggled on leaf tensors");
  node_->requires_grad = on;
  return *this;
}

Tensor& Tensor::retain_grad() {
  node_->retain_grad = true;
  return *this;
}

Tensor Tensor::clone() const {
  return Tensor(new_node(node_->shape, node_->value, node_->requires_grad && node_->is_leaf));
}

Tensor Tensor::detach() const { return Tensor(new_node(node_->shape, node_->value, false)); }

Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad) {
  auto node = new_node(std::move(shape), std::move(values), requires_grad);
  node->is_leaf = !requires_grad;
  return Tensor(std::move(node));
}

std::span<const double> GradientMap::at(const Tensor& t) const {
  auto it = grads_.find(t.node());
  if (it == grads_.end())
    throw ContractError("no gradient recorded for tensor of shape " + shape_str(t.shape()));
  return it->second;
}

std::vector<double> GradientMap::get_or_zero(const Tensor& t) const {
  auto it = grads_.find(t.node());
  if (it == grads_.end()) return std::vector<double>(t.numel(), 0.0);
  return it->second;
}

void Tape::record(const Tensor& output, BackwardFn fn) {
  if (consumed_) throw ContractError("tape already consumed by a backward pass");
  entries_.push_back(Entry{output.node_ptr(), std::move(fn)});
}

std::span<double> Tape::grad_buffer(const Tensor& t) {
  if (!t.requires_grad()) return {};
  auto [it, inserted] = pending_.try_emplace(t.node());
  if (inserted) {
    it->second.assign(t.numel(), 0.0);
    if (t.is_leaf()) leaves_.push_back(t.node_ptr());
  }
  return it->second;
}

void Tape::accumulate(const Tensor& t, std::span<const double> g) {
  auto buf = grad_buffer(t);
  if (buf.empty()) return;
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

void Tape::accumulate_at(const Tensor& t, std::size_t index, double g) {
  auto buf = grad_buffer(t);
  if (!buf.empty()) buf[index] += g;
}

GradientMap Tape::backward(const Tensor& loss) {
  if (consumed_) throw ContractError("tape already consumed by a backward pass");
  if (loss.numel() != 1)
    throw ContractError("backward() needs a scalar loss, got shape " + shape_str(loss.shape()));
  if (!loss.requires_grad())
    throw ContractError("backward() on a loss that does not depend on any requires_grad tensor");
  consumed_ = true;

  GradientMap out;
  grad_buffer(loss)[0] = 1.0;
  for (auto e = entries_.rbegin(); e != entries_.rend(); ++e) {
    auto it = pending_.find(e->output.get());
    if (it == pending_.end()) continue;
    std::vector<double> grad = std::move(it->second);
    pending_.erase(it);
    e->backward(grad, *this);
    if (e->output->retain_grad) out.grads_.emplace(e->output.get(), std::move(grad));
    e->backward = nullptr;
  }
  for (const auto& leaf : leaves_) {
    auto it = pending_.find(leaf.get());
    if (it != pending_.end()) out.grads_.emplace(leaf.get(), std::move(it->second));
  }
  pending_.clear();
  entries_.clear();
  leaves_.clear();
  return out;
}

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

}  // namespace ad
}  // namespace lite
