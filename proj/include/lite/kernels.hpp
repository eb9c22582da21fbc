#pragma once

#include <cstddef>
#include <span>

// Dense row-major matrix kernels used by the autodiff ops.
//
// `lite::kernels::*` are the production kernels: output rows are distributed
// over OpenMP threads once the problem is large enough to amortize the fork.
// `lite::kernels::serial::*` are straightforward reference loops kept for
// tests and the benchmark. Both accumulate every output element over the
// shared dimension in increasing index order, so results agree to rounding
// of fused multiply-adds (bitwise when FMA contraction is off).
namespace lite::kernels {

// c[m x n] = a[m x k] * b[k x n]
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);

// c[m x k] += a[m x n] * b[k x n]^T
void matmul_nt_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k);

// c[k x n] += a[m x k]^T * b[m x n]
void matmul_tn_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n);

// Multiply-adds above which the parallel kernels fork a team.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 18;

// Threads the parallel kernels would use (1 without OpenMP).
int max_threads();

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n);
void matmul_nt_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k);
void matmul_tn_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n);

}  // namespace serial
}  // namespace lite::kernels
