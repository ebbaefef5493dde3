// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/kernels/gemm.hpp"

#include <omp.h>

#include <cstddef>
#include <string>

#include "vb/common/error.hpp"

namespace vb::kernels {
namespace {

// Below this many multiply-adds the fork/join cost dominates.
constexpr std::size_t kParallelWork = 1u << 16;

void check(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok)
    throw ShapeError(op, std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

void prepare(Matrix& c, std::size_t m, std::size_t n, bool accumulate) {
  if (accumulate) {
    if (c.rows() != m || c.cols() != n) throw ShapeError("gemm", "accumulator shape mismatch");
  } else {
    c.resize(m, n, 0.0);
  }
}

}  // namespace

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}
int num_threads() { return omp_get_max_threads(); }

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.cols() == b.rows(), "gemm", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  prepare(c, m, n, accumulate);
  const double* A = a.data();
  const double* B = b.data();
  double* C = c.data();
  const bool par = m * n * k >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double* crow = C + i * n;
    const double* arow = A + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.rows() == b.rows(), "gemm_tn", a, b);
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  prepare(c, m, n, accumulate);
  const double* A = a.data();
  const double* B = b.data();
  double* C = c.data();
  const bool par = m * n * k >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double* crow = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[p * m + i];
      if (av == 0.0) continue;
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.cols() == b.cols(), "gemm_nt", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  prepare(c, m, n, accumulate);
  const double* A = a.data();
  const double* B = b.data();
  double* C = c.data();
  const bool par = m * n * k >= kParallelWork && m > 1;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    const double* arow = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = B + j * k;
      double s = C[i * n + j];
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      C[i * n + j] = s;
    }
  }
}

void add_row_bias(Matrix& c, const Matrix& bias) {
  if (bias.size() != c.cols()) throw ShapeError("add_row_bias", "bias width mismatch");
  for (std::size_t r = 0; r < c.rows(); ++r) {
    auto row = c.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias.data()[j];
  }
}

void accumulate_col_sums(const Matrix& dy, Matrix& grad) {
  if (grad.size() != dy.cols()) throw ShapeError("accumulate_col_sums", "width mismatch");
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    auto row = dy.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) grad.data()[j] += row[j];
  }
}

namespace serial {

void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.cols() == b.rows(), "gemm", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  prepare(c, m, n, accumulate);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = c(i, j);
      for (std::size_t p = 0; p < k; ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.rows() == b.rows(), "gemm_tn", a, b);
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  prepare(c, m, n, accumulate);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = c(i, j);
      for (std::size_t p = 0; p < k; ++p)
        if (a(p, i) != 0.0) s += a(p, i) * b(p, j);
      c(i, j) = s;
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate) {
  check(a.cols() == b.cols(), "gemm_nt", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  prepare(c, m, n, accumulate);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = c(i, j);
      for (std::size_t p = 0; p < k; ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
}

}  // namespace serial
}  // namespace vb::kernels
