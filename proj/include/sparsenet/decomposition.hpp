#pragma once

#include "sparsenet/linalg.hpp"
#include "sparsenet/sparse_basis.hpp"

#include <vector>

namespace sparsenet {

struct Factorization {
  Matrix r_hat;  // M x p inferred activities
  Matrix c_hat;  // p x N inferred adjacency, thresholded
  std::vector<std::vector<Index>> support;  // nonzero columns of each c_hat row
  double residual_fro = 0.0;      // ||G - r_hat c_hat||_F after thresholding
  double residual_pre_fro = 0.0;  // same, before pruning and thresholding
  int pruned = 0;                 // regulators removed by prune_regulators
  int dropped = 0;                // pursuit candidates rejected as duplicates
  Matrix basis;                   // P* x p surviving basis columns
  linalg::TruncatedSvd svd;

  Index regulators() const { return c_hat.rows(); }
  Index nonzeros() const;
};

struct ObjectiveParams {
  double lambda = 0.0;
};

struct PruneOptions {
  // Columns whose largest |entry| is at or below this are dropped, both in
  // the basis itself and in diag(s) * (B^T)^+ scaled by the leading
  // singular value (the map from the left singular vectors to r_hat).
  double threshold = 1e-10;
};

/// ceil(1.25 * p_guess) + 2.
Index default_p_star(Index p_guess);

/// Full pipeline: truncated SVD, basis pursuit, factor assembly, pruning and
/// thresholding of c_hat.
Factorization infer_network(const Matrix& g, Index p_star, const PursuitConfig& cfg,
                            const PursuitObserver& observer = {},
                            const PruneOptions& prune = {});

/// Assembles unpruned factors from an SVD and a basis:
/// c_hat = (v B)^T, r_hat = u diag(s) B (B^T B)^-1.
Factorization assemble_factors(const Matrix& g, const linalg::TruncatedSvd& svd,
                               const Matrix& basis);

/// Drops regulators whose basis weight vanishes (see PruneOptions) and rows
/// of c_hat that are entirely zero. Throws SingularMatrixError if nothing
/// survives.
void prune_regulators(Factorization& f, const PruneOptions& opts = {});

/// Zeroes entries of each c_hat row with |c| <= zero_tol * max|row|, then
/// refreshes support and residual.
void threshold_loadings(Factorization& f, const Matrix& g, double zero_tol);

/// ||g - r c||_F^2 + lambda * nnz(c), entries counted as nonzero when
/// |c_ij| > zero_tol * max_j |c_ij|.
double objective_value(const Matrix& g, const Matrix& r, const Matrix& c,
                       const ObjectiveParams& params, double zero_tol = 1e-8);

/// Count of entries above zero_tol relative to their row maximum.
Index count_nonzeros(const Matrix& c, double zero_tol = 1e-8);

}  // namespace sparsenet
