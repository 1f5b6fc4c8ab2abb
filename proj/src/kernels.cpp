#include "sparsenet/kernels.hpp"

#include "sparsenet/error.hpp"

#include <omp.h>

#include <cmath>
#include <vector>

namespace sparsenet::kernels {

namespace {

inline void take(ArgMax& best, Index i, double value) {
  if (best.index < 0 || value > best.value) {
    best.index = i;
    best.value = value;
  }
}

// Combining per-thread winners: larger value wins, lower index on ties.
inline void merge(ArgMax& best, const ArgMax& other) {
  if (other.index < 0) return;
  if (best.index < 0 || other.value > best.value ||
      (other.value == best.value && other.index < best.index)) {
    best = other;
  }
}

inline double row_abs_sum(const Matrix& w, Index i) {
  double acc = 0.0;
  for (Index j = 0; j < w.cols(); ++j) acc += std::abs(w(i, j));
  return acc;
}

inline double row_dot(const Matrix& w, Index i, const Vector& x) {
  double acc = 0.0;
  for (Index j = 0; j < w.cols(); ++j) acc += w(i, j) * x[j];
  return acc;
}

inline double row_quadratic(const Matrix& w, Index i, const Matrix& k) {
  double acc = 0.0;
  for (Index a = 0; a < w.cols(); ++a) {
    double ka = 0.0;
    for (Index b = 0; b < w.cols(); ++b) ka += k(a, b) * w(i, b);
    acc += w(i, a) * ka;
  }
  return acc;
}

void check_mask(const Matrix& w, std::span<const char> mask) {
  if (static_cast<Index>(mask.size()) != w.rows()) {
    throw DimensionError("kernel mask length does not match row count");
  }
}

template <typename RowValue>
ArgMax masked_argmax_parallel(Index rows, std::span<const char> mask, RowValue f) {
  const int nt = omp_get_max_threads();
  std::vector<ArgMax> local(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
  {
    ArgMax mine;
    const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
    for (Index i = 0; i < rows; ++i) {
      if (mask[static_cast<std::size_t>(i)]) take(mine, i, f(i));
    }
    local[static_cast<std::size_t>(tid)] = mine;
  }
  ArgMax best;
  for (const ArgMax& m : local) merge(best, m);
  return best;
}

}  // namespace

namespace serial {

ArgMax row_abs_sum_argmax(const Matrix& w, std::span<const char> mask) {
  check_mask(w, mask);
  ArgMax best;
  for (Index i = 0; i < w.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) take(best, i, row_abs_sum(w, i));
  }
  return best;
}

ArgMax projection_argmax(const Matrix& w, const Vector& x,
                         std::span<const char> mask) {
  check_mask(w, mask);
  ArgMax best;
  for (Index i = 0; i < w.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) take(best, i, std::abs(row_dot(w, i, x)));
  }
  return best;
}

ArgMax masked_argmax(const Vector& values, std::span<const char> mask) {
  if (static_cast<Index>(mask.size()) != values.size()) {
    throw DimensionError("kernel mask length does not match value count");
  }
  ArgMax best;
  for (Index i = 0; i < values.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) take(best, i, values[i]);
  }
  return best;
}

Vector leverage(const Matrix& w, const Matrix& k) {
  Vector lev(w.rows());
  for (Index i = 0; i < w.rows(); ++i) lev[i] = row_quadratic(w, i, k);
  return lev;
}

void update_leverage(const Matrix& w, const Vector& kr, double denom,
                     std::span<const char> mask, Vector& lev) {
  check_mask(w, mask);
  for (Index i = 0; i < w.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double t = row_dot(w, i, kr);
    lev[i] += t * t / denom;
  }
}

Matrix cross_correlation(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("cross_correlation: column mismatch");
  Matrix out(a.rows(), b.rows());
  const double n = static_cast<double>(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < b.rows(); ++k) {
      double acc = 0.0;
      for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(k, j);
      out(i, k) = acc / n;
    }
  }
  return out;
}

Matrix inflate(const Matrix& v, const Matrix& basis) {
  if (basis.rows() != v.cols()) throw DimensionError("inflate: basis row mismatch");
  Matrix out = v;
  const Index p = v.cols();
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index c = 0; c < basis.cols(); ++c) {
      double proj = 0.0;
      for (Index j = 0; j < p; ++j) proj += v(i, j) * basis(j, c);
      for (Index j = 0; j < p; ++j) out(i, j) += proj * basis(j, c);
    }
  }
  return out;
}

}  // namespace serial

namespace parallel {

ArgMax row_abs_sum_argmax(const Matrix& w, std::span<const char> mask) {
  if (w.rows() < kParallelRowThreshold) return serial::row_abs_sum_argmax(w, mask);
  check_mask(w, mask);
  return masked_argmax_parallel(w.rows(), mask,
                                [&](Index i) { return row_abs_sum(w, i); });
}

ArgMax projection_argmax(const Matrix& w, const Vector& x,
                         std::span<const char> mask) {
  if (w.rows() < kParallelRowThreshold) return serial::projection_argmax(w, x, mask);
  check_mask(w, mask);
  return masked_argmax_parallel(
      w.rows(), mask, [&](Index i) { return std::abs(row_dot(w, i, x)); });
}

ArgMax masked_argmax(const Vector& values, std::span<const char> mask) {
  if (values.size() < kParallelRowThreshold) return serial::masked_argmax(values, mask);
  if (static_cast<Index>(mask.size()) != values.size()) {
    throw DimensionError("kernel mask length does not match value count");
  }
  return masked_argmax_parallel(values.size(), mask, [&](Index i) { return values[i]; });
}

Vector leverage(const Matrix& w, const Matrix& k) {
  if (w.rows() < kParallelRowThreshold) return serial::leverage(w, k);
  Vector lev(w.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < w.rows(); ++i) lev[i] = row_quadratic(w, i, k);
  return lev;
}

void update_leverage(const Matrix& w, const Vector& kr, double denom,
                     std::span<const char> mask, Vector& lev) {
  if (w.rows() < kParallelRowThreshold) return serial::update_leverage(w, kr, denom, mask, lev);
  check_mask(w, mask);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < w.rows(); ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const double t = row_dot(w, i, kr);
    lev[i] += t * t / denom;
  }
}

Matrix cross_correlation(const Matrix& a, const Matrix& b) {
  if (a.rows() < 8 || a.cols() < kParallelRowThreshold) {
    return serial::cross_correlation(a, b);
  }
  if (a.cols() != b.cols()) throw DimensionError("cross_correlation: column mismatch");
  Matrix out(a.rows(), b.rows());
  const double n = static_cast<double>(a.cols());
#pragma omp parallel for collapse(2) schedule(static)
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = 0; k < b.rows(); ++k) {
      double acc = 0.0;
      for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(k, j);
      out(i, k) = acc / n;
    }
  }
  return out;
}

Matrix inflate(const Matrix& v, const Matrix& basis) {
  if (v.rows() < kParallelRowThreshold) return serial::inflate(v, basis);
  if (basis.rows() != v.cols()) throw DimensionError("inflate: basis row mismatch");
  Matrix out = v;
  const Index p = v.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index c = 0; c < basis.cols(); ++c) {
      double proj = 0.0;
      for (Index j = 0; j < p; ++j) proj += v(i, j) * basis(j, c);
      for (Index j = 0; j < p; ++j) out(i, j) += proj * basis(j, c);
    }
  }
  return out;
}

}  // namespace parallel

}  // namespace sparsenet::kernels
