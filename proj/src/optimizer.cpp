#include "lite/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "lite/errors.hpp"

namespace lite {

Adam::Adam(std::vector<ad::Tensor> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) total_ += p.numel();
  m_.assign(total_, 0.0);
  v_.assign(total_, 0.0);
}

void Adam::step(std::span<const double> flat_grad, double lr) {
  if (flat_grad.size() != total_)
    throw ShapeError("Adam::step: gradient has " + std::to_string(flat_grad.size()) +
                     " values, parameters have " + std::to_string(total_));
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  std::size_t off = 0;
  for (auto& p : params_) {
    auto w = p.mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i, ++off) {
      const double g = flat_grad[off];
      m_[off] = b1 * m_[off] + (1.0 - b1) * g;
      v_[off] = b2 * v_[off] + (1.0 - b2) * g * g;
      const double update = (m_[off] / c1) / (std::sqrt(v_[off] / c2) + options_.eps);
      w[i] -= lr * (update + options_.weight_decay * w[i]);
    }
  }
}

double clip_grad_norm(std::span<double> grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

double cosine_lr(std::size_t step, std::size_t total_steps, std::size_t warmup_steps, double base_lr,
                 double min_lr) {
  if (step < warmup_steps)
    return base_lr * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
  if (total_steps <= warmup_steps) return base_lr;
  const double progress = static_cast<double>(step - warmup_steps) /
                          static_cast<double>(total_steps - warmup_steps);
  return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace lite
