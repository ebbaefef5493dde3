// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vb/common/matrix.hpp"

// Dense matrix products used by the neural runtime.
//
// The OpenMP versions split work over output rows only, and every output
// element is accumulated over the inner dimension in ascending order starting
// from its previous value. The serial reference versions use the textbook
// loop nest with the same per-element order, so both produce bit-identical
// results for any thread count.

namespace vb::kernels {

/// C (m x n) = A (m x k) * B (k x n), or C += A * B when accumulate is set.
void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
/// C (m x n) = A^T * B with A (k x m), B (k x n).
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
/// C (m x n) = A * B^T with A (m x k), B (n x k).
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);

/// Adds `bias` to every row of `c`.
void add_row_bias(Matrix& c, const Matrix& bias);
/// grad (1 x n) += column sums of `dy`.
void accumulate_col_sums(const Matrix& dy, Matrix& grad);

namespace serial {
void gemm(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c, bool accumulate = false);
}  // namespace serial

/// Worker count used by the parallel kernels (0 = OpenMP default).
void set_num_threads(int n);
int num_threads();

}  // namespace vb::kernels
