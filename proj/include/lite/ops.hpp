#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lite/tensor.hpp"

// Differentiable primitives. Every op records itself on the calling thread's
// active tape when any input requires a gradient; otherwise it is a plain
// forward computation. Matrices are rank-2 row-major; rank-1 tensors act as
// a single row where noted.
namespace lite::ad {

enum class Activation { relu, gelu, sigmoid };

Activation parse_activation(std::string_view name);

// [m x k] x [k x n] -> [m x n]
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Elementwise on identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// x[m x n] + bias[n] on every row; the only broadcast the library supports.
Tensor add_row_bias(const Tensor& x, const Tensor& bias);

Tensor activation(const Tensor& x, Activation kind);
inline Tensor relu(const Tensor& x) { return activation(x, Activation::relu); }
inline Tensor gelu(const Tensor& x) { return activation(x, Activation::gelu); }
inline Tensor sigmoid(const Tensor& x) { return activation(x, Activation::sigmoid); }

// Max-subtracted softmax along `axis`. Throws ContractError on NaN input.
Tensor softmax(const Tensor& x, std::size_t axis);

// Normalizes over the last axis, then applies gain[d] and bias[d].
Tensor layernorm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps);

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);

// [m x n] -> [1 x n]
Tensor mean_rows(const Tensor& x);
// -> scalar [1]
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Softmax cross-entropy of one logit row against class `target` -> scalar.
Tensor cross_entropy(const Tensor& logits, std::size_t target);

// Mean over elements of -[t log sigmoid(x) + (1 - t) log(1 - sigmoid(x))], computed stably.
Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets);

// Scalar helpers without taping.
double sigmoid_value(double x);
double gelu_value(double x);

}  // namespace lite::ad
