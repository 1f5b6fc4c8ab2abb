#include "sparsenet/linalg.hpp"

#include "sparsenet/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace sparsenet::linalg {

double fix_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return 1.0;
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) {
    v = -v;
    return -1.0;
  }
  return 1.0;
}

TruncatedSvd truncated_svd(const Matrix& g, Index p_star) {
  const Index lim = std::min(g.rows(), g.cols());
  if (p_star < 1 || p_star > lim) {
    throw DimensionError("truncated_svd: p_star=" + std::to_string(p_star) +
                         " outside [1, " + std::to_string(lim) + "]");
  }
  if (!g.allFinite()) throw ParameterError("truncated_svd: non-finite input");

  Eigen::BDCSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw ConvergenceError("truncated_svd: SVD solver did not converge");
  }

  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(p_star);
  out.s = svd.singularValues().head(p_star);
  out.v = svd.matrixV().leftCols(p_star);
  for (Index j = 0; j < p_star; ++j) {
    Vector col = out.v.col(j);
    if (fix_sign(col) < 0.0) {
      out.v.col(j) = col;
      out.u.col(j) = -out.u.col(j);
    }
  }
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("symmetric_eigen: solver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

EigenPair direct_dominant(const Matrix& k) {
  SymmetricEigen es = symmetric_eigen(k);
  const Index last = k.rows() - 1;
  EigenPair out{es.values[last], es.vectors.col(last)};
  fix_sign(out.vector);
  return out;
}

}  // namespace

EigenPair largest_eigvec(const Matrix& k, const std::optional<Vector>& warm_start,
                         const PowerOptions& opts) {
  const Index p = k.rows();
  if (p == 0 || k.cols() != p) {
    throw DimensionError("largest_eigvec: matrix must be square and non-empty");
  }

  Vector v;
  if (warm_start && warm_start->size() == p && warm_start->norm() > 0.0) {
    v = warm_start->normalized();
  } else {
    v = Vector::Ones(p).normalized();
  }

  Vector kv = k * v;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const double lambda = v.dot(kv);
    if ((kv - lambda * v).norm() <= opts.rel_tol * std::abs(lambda)) {
      EigenPair out{lambda, v};
      fix_sign(out.vector);
      return out;
    }
    const double nrm = kv.norm();
    if (nrm == 0.0) break;  // v is in the null space; restart is pointless
    v = kv / nrm;
    kv.noalias() = k * v;
  }

  if (!opts.fallback) {
    throw ConvergenceError("largest_eigvec: power iteration exceeded " +
                           std::to_string(opts.max_iter) + " iterations");
  }
  return direct_dominant(k);
}

Matrix gram_inverse(const Matrix& v_sub, double tau_sing) {
  const Matrix gram = v_sub.transpose() * v_sub;
  SymmetricEigen es = symmetric_eigen(gram);
  if (gram.rows() == 0 || es.values[0] <= tau_sing) {
    throw SingularMatrixError("gram_inverse: Gram matrix is singular (min eigenvalue " +
                              std::to_string(gram.rows() ? es.values[0] : 0.0) + ")");
  }
  Matrix inv = es.vectors * es.values.cwiseInverse().asDiagonal() *
               es.vectors.transpose();
  return 0.5 * (inv + inv.transpose());
}

double gram_remove_row_inplace(Matrix& k_inv, const Eigen::Ref<const Vector>& row,
                               double tau_sing, Vector* k_row) {
  if (row.size() != k_inv.rows()) {
    throw DimensionError("gram_remove_row: row length does not match K");
  }
  const Vector kr = k_inv * row;
  const double denom = 1.0 - row.dot(kr);
  if (k_row) *k_row = kr;
  if (denom <= tau_sing) return denom;
  k_inv.noalias() += (kr * kr.transpose()) / denom;
  return denom;
}

std::optional<Matrix> gram_remove_row(const Matrix& k_inv,
                                      const Eigen::Ref<const Vector>& row,
                                      double tau_sing) {
  Matrix out = k_inv;
  if (gram_remove_row_inplace(out, row, tau_sing) <= tau_sing) return std::nullopt;
  return out;
}

}  // namespace sparsenet::linalg
