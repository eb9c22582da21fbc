#include "lite/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lite::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Forking inside an already-parallel region (per-clip loops) only adds overhead.
bool go_parallel(std::size_t work) {
#ifdef _OPENMP
  return work >= kParallelThreshold && !omp_in_parallel() && omp_get_max_threads() > 1;
#else
  (void)work;
  return false;
#endif
}

inline void row_nn(const double* a_row, const double* b, double* c_row, std::size_t k,
                   std::size_t n) {
  std::fill(c_row, c_row + n, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    const double av = a_row[p];
    const double* b_row = b + p * n;
    for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
  }
}

}  // namespace

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  const auto rows = static_cast<std::ptrdiff_t>(m);
  if (go_parallel(m * k * n)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) row_nn(ap + i * k, bp, cp + i * n, k, n);
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) row_nn(ap + i * k, bp, cp + i * n, k, n);
  }
}

void matmul_nt_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k) {
  // b^T staged contiguously so the inner loop streams rows.
  std::vector<double> bt(n * k);
  for (std::size_t q = 0; q < k; ++q)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + q] = b[q * n + j];
  const double* ap = a.data();
  const double* btp = bt.data();
  double* cp = c.data();
  const auto rows = static_cast<std::ptrdiff_t>(m);
  auto body = [&](std::ptrdiff_t i) {
    const double* a_row = ap + i * n;
    double* c_row = cp + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double av = a_row[j];
      const double* bt_row = btp + j * k;
      for (std::size_t q = 0; q < k; ++q) c_row[q] += av * bt_row[q];
    }
  };
  if (go_parallel(m * n * k)) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < rows; ++i) body(i);
  }
}

void matmul_tn_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n) {
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  if (go_parallel(m * k * n)) {
    const auto out_rows = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < out_rows; ++p) {
      double* c_row = cp + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        const double av = ap[i * k + p];
        const double* b_row = bp + i * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const double* a_row = ap + i * k;
      const double* b_row = bp + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a_row[p];
        double* c_row = cp + p * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
      }
    }
  }
}

namespace serial {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      c[i * n + j] = s;
    }
}

void matmul_nt_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t q = 0; q < k; ++q) {
      double s = c[i * k + q];
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * b[q * n + j];
      c[i * k + q] = s;
    }
}

void matmul_tn_acc(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) {
      double s = c[p * n + j];
      for (std::size_t i = 0; i < m; ++i) s += a[i * k + p] * b[i * n + j];
      c[p * n + j] = s;
    }
}

}  // namespace serial
}  // namespace lite::kernels
