#pragma once

#include <cstddef>
#include <vector>

#include "lite/tensor.hpp"

namespace lite {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled
};

// Adam with decoupled weight decay. Gradients arrive as one flat vector laid
// out in parameter order (see flatten_gradients).
class Adam {
 public:
  Adam(std::vector<ad::Tensor> params, AdamOptions options = {});

  void step(std::span<const double> flat_grad, double lr);
  std::size_t num_values() const { return total_; }
  std::size_t steps() const { return t_; }

 private:
  std::vector<ad::Tensor> params_;
  AdamOptions options_;
  std::vector<double> m_, v_;
  std::size_t total_ = 0;
  std::size_t t_ = 0;
};

// Scales `grad` in place so its L2 norm is at most max_norm; returns the norm before clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

// Cosine decay from base_lr to min_lr over total_steps after a linear warmup.
double cosine_lr(std::size_t step, std::size_t total_steps, std::size_t warmup_steps, double base_lr,
                 double min_lr);

}  // namespace lite
