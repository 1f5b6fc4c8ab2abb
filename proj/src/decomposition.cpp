#include "sparsenet/decomposition.hpp"

#include "sparsenet/error.hpp"

#include <cmath>

namespace sparsenet {

Index count_nonzeros(const Matrix& c, double zero_tol) {
  Index count = 0;
  for (Index i = 0; i < c.rows(); ++i) {
    const double cut = zero_tol * c.row(i).cwiseAbs().maxCoeff();
    for (Index j = 0; j < c.cols(); ++j) {
      if (std::abs(c(i, j)) > cut) ++count;
    }
  }
  return count;
}

Index Factorization::nonzeros() const { return count_nonzeros(c_hat, 0.0); }

Index default_p_star(Index p_guess) {
  if (p_guess < 1) throw ParameterError("default_p_star: p_guess must be >= 1");
  return static_cast<Index>(std::ceil(1.25 * static_cast<double>(p_guess))) + 2;
}

Factorization assemble_factors(const Matrix& g, const linalg::TruncatedSvd& svd,
                               const Matrix& basis) {
  if (basis.rows() != svd.v.cols() || basis.cols() < 1) {
    throw DimensionError("assemble_factors: basis shape does not match the SVD");
  }
  Factorization f;
  f.svd = svd;
  f.basis = basis;
  f.c_hat = (svd.v * basis).transpose();

  const Vector sv = Eigen::JacobiSVD<Matrix>(basis).singularValues();
  if (!(sv.minCoeff() > 1e-10 * sv.maxCoeff())) {
    throw SingularMatrixError("assemble_factors: basis is rank deficient");
  }
  const Matrix gram = basis.transpose() * basis;
  Eigen::LDLT<Matrix> ldlt(gram);
  const Matrix pinv_t = basis * ldlt.solve(Matrix::Identity(gram.rows(), gram.cols()));
  f.r_hat = svd.u * svd.s.asDiagonal() * pinv_t;
  f.residual_pre_fro = (g - f.r_hat * f.c_hat).norm();
  f.residual_fro = f.residual_pre_fro;
  return f;
}

void prune_regulators(Factorization& f, const PruneOptions& opts) {
  const Index p = f.basis.cols();
  const double s_max = f.svd.s.size() ? f.svd.s[0] : 0.0;

  Matrix weights = Matrix::Zero(f.basis.rows(), p);
  if (s_max > 0.0) {
    const Matrix gram = f.basis.transpose() * f.basis;
    const Matrix pinv_t =
        f.basis * gram.ldlt().solve(Matrix::Identity(gram.rows(), gram.cols()));
    weights = (f.svd.s / s_max).asDiagonal() * pinv_t;
  }

  std::vector<Index> keep;
  for (Index j = 0; j < p; ++j) {
    const bool vanishing_basis = f.basis.col(j).cwiseAbs().maxCoeff() <= opts.threshold;
    const bool vanishing_weight = weights.col(j).cwiseAbs().maxCoeff() <= opts.threshold;
    const bool empty_row = f.c_hat.row(j).cwiseAbs().maxCoeff() == 0.0;
    if (!(vanishing_basis || vanishing_weight || empty_row)) keep.push_back(j);
  }
  if (keep.empty()) throw SingularMatrixError("prune_regulators: every regulator pruned");

  f.pruned += static_cast<int>(p - static_cast<Index>(keep.size()));
  if (static_cast<Index>(keep.size()) == p) return;
  f.basis = f.basis(Eigen::all, keep).eval();
  f.r_hat = f.r_hat(Eigen::all, keep).eval();
  f.c_hat = f.c_hat(keep, Eigen::all).eval();
}

void threshold_loadings(Factorization& f, const Matrix& g, double zero_tol) {
  f.support.assign(static_cast<std::size_t>(f.c_hat.rows()), {});
  for (Index i = 0; i < f.c_hat.rows(); ++i) {
    const double cut = zero_tol * f.c_hat.row(i).cwiseAbs().maxCoeff();
    for (Index j = 0; j < f.c_hat.cols(); ++j) {
      if (std::abs(f.c_hat(i, j)) <= cut) {
        f.c_hat(i, j) = 0.0;
      } else {
        f.support[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }
  f.residual_fro = (g - f.r_hat * f.c_hat).norm();
}

Factorization infer_network(const Matrix& g, Index p_star, const PursuitConfig& cfg,
                            const PursuitObserver& observer, const PruneOptions& prune) {
  cfg.validate();
  if (g.rows() < 2) throw DimensionError("infer_network: need at least two observations");
  if (p_star < 1 || g.cols() <= p_star) {
    throw DimensionError("infer_network: need N > p_star >= 1");
  }
  const linalg::TruncatedSvd svd = linalg::truncated_svd(g, p_star);
  const BasisMatrix basis = solve_basis(svd.v, p_star, cfg, observer);

  Factorization f = assemble_factors(g, svd, basis.matrix());
  f.dropped = basis.dropped;
  prune_regulators(f, prune);
  threshold_loadings(f, g, cfg.zero_tol);
  return f;
}

double objective_value(const Matrix& g, const Matrix& r, const Matrix& c,
                       const ObjectiveParams& params, double zero_tol) {
  if (r.rows() != g.rows() || c.cols() != g.cols() || r.cols() != c.rows()) {
    throw DimensionError("objective_value: shapes do not conform");
  }
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw ParameterError("objective_value: lambda must be finite and >= 0");
  }
  return (g - r * c).squaredNorm() +
         params.lambda * static_cast<double>(count_nonzeros(c, zero_tol));
}

}  // namespace sparsenet
