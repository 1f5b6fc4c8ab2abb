#pragma once

#include <Eigen/Dense>

#include <optional>

namespace sparsenet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Rank-p factors of a data matrix: g ~ u * diag(s) * v^T.
struct TruncatedSvd {
  Matrix u;  // M x p
  Vector s;  // descending, non-negative
  Matrix v;  // N x p

  Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Thin SVD truncated to the leading `p_star` singular triplets.
///
/// Each right singular vector is sign-fixed so its largest-magnitude entry
/// is positive (the matching left vector is flipped with it), which makes
/// the output deterministic. Throws DimensionError when p_star is outside
/// [1, min(rows, cols)] and ConvergenceError if the solver reports failure.
TruncatedSvd truncated_svd(const Matrix& g, Index p_star);

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

struct PowerOptions {
  int max_iter = 10000;
  double rel_tol = 1e-9;
  // When false, exceeding max_iter throws instead of solving the P x P
  // problem directly.
  bool fallback = true;
};

/// Dominant eigenpair of a symmetric matrix by power iteration.
///
/// Converged when ||k v - lambda v|| <= rel_tol * lambda. The returned
/// vector has its largest-magnitude entry positive (lowest index wins ties).
EigenPair largest_eigvec(const Matrix& k,
                         const std::optional<Vector>& warm_start = std::nullopt,
                         const PowerOptions& opts = {});

/// Inverse of the Gram matrix of v_sub. Throws SingularMatrixError when the
/// Gram's smallest eigenvalue is <= tau_sing.
Matrix gram_inverse(const Matrix& v_sub, double tau_sing = 1e-10);

/// Sherman-Morrison downdate for deleting `row` from the retained rows:
/// given k_inv = A^-1 returns (A - row row^T)^-1, or nullopt when
/// 1 - row^T k_inv row <= tau_sing (the reduced Gram is singular).
std::optional<Matrix> gram_remove_row(const Matrix& k_inv,
                                      const Eigen::Ref<const Vector>& row,
                                      double tau_sing = 1e-10);

/// In-place form of gram_remove_row. Returns the downdate denominator;
/// k_inv is left untouched when the denominator is <= tau_sing. When
/// `k_row` is given it receives k_inv * row (computed before the update).
double gram_remove_row_inplace(Matrix& k_inv,
                               const Eigen::Ref<const Vector>& row,
                               double tau_sing = 1e-10, Vector* k_row = nullptr);

/// Flips v so its largest-magnitude entry is positive. Returns the sign used.
double fix_sign(Eigen::Ref<Vector> v);

/// Symmetric eigendecomposition with ascending eigenvalues.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace linalg
}  // namespace sparsenet
