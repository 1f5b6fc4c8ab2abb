#pragma once

// Row-parallel inner loops shared by the pursuit, inflation and scoring code.
//
// Every kernel has a serial reference in `kernels::serial` and an OpenMP
// version in `kernels::parallel` with the same signature and bit-identical
// results (reductions keep the lowest index on ties, and per-row arithmetic
// is done in the same order in both).

#include "sparsenet/linalg.hpp"

#include <span>

namespace sparsenet::kernels {

// Rows shorter than this are handled by the serial path even in `parallel`.
inline constexpr Index kParallelRowThreshold = 512;

struct ArgMax {
  Index index = -1;
  double value = 0.0;
};

namespace serial {

/// argmax over rows with mask[i] != 0 of sum_j |w(i, j)|.
ArgMax row_abs_sum_argmax(const Matrix& w, std::span<const char> mask);

/// argmax over rows with mask[i] != 0 of |w.row(i) . x|.
ArgMax projection_argmax(const Matrix& w, const Vector& x,
                         std::span<const char> mask);

/// argmax over rows with mask[i] != 0 of values[i].
ArgMax masked_argmax(const Vector& values, std::span<const char> mask);

/// Leverage scores w_i^T k w_i of every row.
Vector leverage(const Matrix& w, const Matrix& k);

/// Leverage refresh after a Sherman-Morrison downdate k += kr kr^T / denom:
/// lev_i += (w_i . kr)^2 / denom on masked rows.
void update_leverage(const Matrix& w, const Vector& kr, double denom,
                     std::span<const char> mask, Vector& lev);

/// a * b^T / n for row-normalized a (p x n) and b (q x n).
Matrix cross_correlation(const Matrix& a, const Matrix& b);

/// v + (v * basis) * basis^T
Matrix inflate(const Matrix& v, const Matrix& basis);

}  // namespace serial

namespace parallel {

ArgMax row_abs_sum_argmax(const Matrix& w, std::span<const char> mask);
ArgMax projection_argmax(const Matrix& w, const Vector& x,
                         std::span<const char> mask);
ArgMax masked_argmax(const Vector& values, std::span<const char> mask);
Vector leverage(const Matrix& w, const Matrix& k);
void update_leverage(const Matrix& w, const Vector& kr, double denom,
                     std::span<const char> mask, Vector& lev);
Matrix cross_correlation(const Matrix& a, const Matrix& b);
Matrix inflate(const Matrix& v, const Matrix& basis);

}  // namespace parallel

}  // namespace sparsenet::kernels
