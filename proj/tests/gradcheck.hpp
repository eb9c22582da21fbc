#pragma once

// Central finite-difference gradient oracle, independent of the tape.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "lite/ops.hpp"
#include "lite/rng.hpp"
#include "lite/tensor.hpp"

namespace lite::testing {

using ad::Tensor;

inline Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0,
                            bool requires_grad = true) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

// Reduces any tensor to a scalar through fixed random weights so every output
// element contributes a distinct amount to the loss.
inline Tensor weighted_sum(const Tensor& x, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(x.numel());
  for (double& v : w) v = rng.uniform(-1.0, 1.0);
  return ad::sum(ad::mul(x, Tensor::from(x.shape(), std::move(w))));
}

// ||a - b|| / max(||a||, ||b||), or the absolute difference norm when both are tiny.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::max(std::sqrt(na), std::sqrt(nb));
  return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::vector<std::vector<double>> analytic;
  std::vector<std::vector<double>> numeric;
};

// f builds a scalar loss from `inputs`. Analytic gradients come from one taped
// evaluation; numeric gradients perturb each input element by +/- step with no
// tape active.
inline GradCheck check_gradients(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                                 std::vector<Tensor> inputs, double step = 1e-5) {
  GradCheck out;
  {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    Tensor loss = f(inputs);
    auto grads = tape.backward(loss);
    for (const auto& t : inputs) out.analytic.push_back(grads.get_or_zero(t));
  }
  for (auto& t : inputs) {
    std::vector<double> num(t.numel());
    auto data = t.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double orig = data[i];
      data[i] = orig + step;
      const double fp = f(inputs).item();
      data[i] = orig - step;
      const double fm = f(inputs).item();
      data[i] = orig;
      num[i] = (fp - fm) / (2.0 * step);
    }
    out.numeric.push_back(std::move(num));
  }
  for (std::size_t k = 0; k < inputs.size(); ++k)
    out.max_rel_error =
        std::max(out.max_rel_error, relative_error(out.analytic[k], out.numeric[k]));
  return out;
}

}  // namespace lite::testing
