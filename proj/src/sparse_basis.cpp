#include "sparsenet/sparse_basis.hpp"

#include "sparsenet/error.hpp"
#include "sparsenet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace sparsenet {

void PursuitConfig::validate() const {
  if (!(tau_sing > 0.0) || !(tau_conv > 0.0) || !(zero_tol > 0.0)) {
    throw ParameterError("pursuit tolerances must be positive");
  }
  if (k_switch < 1) throw ParameterError("k_switch must be >= 1");
  if (!(epsilon_dup > 0.0 && epsilon_dup < 1.0)) {
    throw ParameterError("epsilon_dup must lie in (0, 1)");
  }
  if (max_restarts < 0) throw ParameterError("max_restarts must be >= 0");
  if (starts < 1) throw ParameterError("starts must be >= 1");
}

double abs_pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DimensionError("abs_pearson: length mismatch");
  }
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  const double den = ac.norm() * bc.norm();
  if (den == 0.0) return 0.0;
  return std::min(1.0, std::abs(ac.dot(bc)) / den);
}

Matrix BasisMatrix::matrix() const {
  if (columns.empty()) return Matrix();
  Matrix out(columns.front().b.size(), size());
  for (Index j = 0; j < size(); ++j) out.col(j) = columns[static_cast<std::size_t>(j)].b;
  return out;
}

Matrix inflate(const Matrix& v, const BasisMatrix& previous) {
  if (previous.columns.empty()) throw DimensionError("inflate: no previous columns");
  const Matrix b = previous.matrix();
  if (b.rows() != v.cols()) throw DimensionError("inflate: basis length mismatch");
  return kernels::parallel::inflate(v, b);
}

namespace {

Matrix retained_rows(const Matrix& m, const std::vector<char>& retained) {
  Index count = 0;
  for (char r : retained) count += r ? 1 : 0;
  Matrix out(count, m.cols());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    if (retained[static_cast<std::size_t>(i)]) out.row(k++) = m.row(i);
  }
  return out;
}

constexpr double kRefreshGrowth = 1e3;

// Fewer than P+1 retained rows are singular by dimension count alone.
bool is_forced(const ColumnSolution& sol, const Matrix& v) {
  return v.rows() - static_cast<Index>(sol.removed.size()) <= v.cols();
}

double max_abs_pearson(const Vector& loading, const Matrix& known) {
  double best = 0.0;
  for (Index j = 0; j < known.cols(); ++j) {
    best = std::max(best, abs_pearson(loading, known.col(j)));
  }
  return best;
}

// One pursuit from one seed row with one selection rule. Single use.
class Pursuit {
 public:
  Pursuit(const Matrix& v, const Matrix& working, const Matrix& to_v,
          const PursuitConfig& cfg, const PursuitObserver& observer, const Matrix& known,
          SelectionRule rule)
      : v_(v), working_(working), to_v_(to_v), cfg_(cfg), observer_(observer),
        known_(known), rule_(rule), n_(v.rows()), p_(v.cols()),
        retained_(static_cast<std::size_t>(v.rows()), 1) {}

  // start < 0 seeds the removed set with the row of largest l1 norm.
  ColumnSolution run(Index start) {
    on_working_ = !(working_ == v_);
    src_ = on_working_ ? &working_ : &v_;
    reset_inverse();

    if (start < 0) start = kernels::parallel::row_abs_sum_argmax(*src_, retained_).index;
    if (move(start)) return finish(StopReason::Singular);

    std::optional<Vector> warm;
    std::optional<Vector> previous;
    double previous_corr = std::numeric_limits<double>::infinity();

    for (;;) {
      if (on_working_ && leave_working(warm, previous_corr)) {
        on_working_ = false;
        src_ = &v_;
        warm.reset();
        if (!reset_inverse()) return finish(StopReason::Singular);
      }

      const linalg::EigenPair top = linalg::largest_eigvec(k_inv_, warm, cfg_.power);
      warm = top.vector;
      if (1.0 / top.value <= cfg_.tau_sing * scale_) return finish(StopReason::Singular);

      Vector candidate = top.vector;
      if (on_working_) candidate = (to_v_ * top.vector).normalized();
      if (previous && std::abs(candidate.dot(*previous)) >= 1.0 - cfg_.tau_conv) {
        return finish(StopReason::Stagnated);
      }
      previous = std::move(candidate);

      // u = V0 v / s; the 1/s factor does not change the argmax.
      const kernels::ArgMax next =
          rule_ == SelectionRule::Leverage
              ? kernels::parallel::masked_argmax(leverage_, retained_)
              : kernels::parallel::projection_argmax(*src_, top.vector, retained_);
      if (move(next.index)) return finish(StopReason::Singular);
    }
  }

 private:
  // Recomputes K from the retained rows of the current source; false if
  // they are already rank deficient. A refresh keeps the singularity scale
  // of the last full reset.
  bool reset_inverse(bool refresh = false) {
    const Matrix rows = retained_rows(*src_, retained_);
    const Matrix gram = rows.transpose() * rows;
    const linalg::SymmetricEigen es = linalg::symmetric_eigen(gram);
    if (!refresh) scale_ = std::max(es.values[p_ - 1], std::numeric_limits<double>::min());
    growth_ = 1.0;
    if (rows.rows() < p_ || es.values[0] <= cfg_.tau_sing * scale_) return false;
    k_inv_ = es.vectors * es.values.cwiseInverse().asDiagonal() * es.vectors.transpose();
    k_inv_ = 0.5 * (k_inv_ + k_inv_.transpose());
    if (rule_ == SelectionRule::Leverage) leverage_ = kernels::parallel::leverage(*src_, k_inv_);
    return true;
  }

  bool leave_working(const std::optional<Vector>& warm, double& previous_corr) {
    if (cfg_.switch_mode == SwitchMode::FixedCycles || known_.cols() == 0 || !warm) {
      return cycles_ >= cfg_.k_switch;
    }
    const Vector loading = v_ * (to_v_ * *warm).normalized();
    const double corr = max_abs_pearson(loading, known_);
    const bool leave = corr < 1.0 - cfg_.epsilon_dup && corr < previous_corr;
    previous_corr = corr;
    return leave;
  }

  // Moves row i from the retained to the removed set. True when the
  // retained rows have become rank deficient.
  bool move(Index i) {
    if (i < 0) throw ConvergenceError("pursue_column: retained set exhausted");
    if (static_cast<Index>(removed_.size()) >= n_ - p_ + 1) {
      throw ConvergenceError("pursue_column: exceeded N - P + 1 index moves");
    }
    retained_[static_cast<std::size_t>(i)] = 0;
    removed_.push_back(i);
    ++cycles_;
    Vector kr;
    const double denom = linalg::gram_remove_row_inplace(k_inv_, src_->row(i).transpose(),
                                                         cfg_.tau_sing, &kr);
    const Index left = n_ - static_cast<Index>(removed_.size());
    if (denom <= cfg_.tau_sing || left < p_) return true;
    // Each downdate amplifies the rounding already in K by about 1/denom.
    growth_ /= denom;
    if (growth_ > kRefreshGrowth) {
      if (!reset_inverse(true)) return true;
    } else if (rule_ == SelectionRule::Leverage) {
      kernels::parallel::update_leverage(*src_, kr, denom, retained_, leverage_);
    }
    if (observer_) observer_(CycleState{cycles_, k_inv_, *src_, retained_, on_working_});
    return false;
  }

  ColumnSolution finish(StopReason reason) {
    ColumnSolution out;
    const Matrix rows = retained_rows(v_, retained_);
    const linalg::SymmetricEigen es = linalg::symmetric_eigen(rows.transpose() * rows);
    out.b = es.vectors.col(0);
    linalg::fix_sign(out.b);
    out.smallest_singular = std::sqrt(std::max(0.0, es.values[0]));
    out.cycles = cycles_;
    out.stop = reason;
    out.rule = rule_;
    out.removed = removed_;

    const Vector loading = v_ * out.b;
    const double cut = cfg_.zero_tol * loading.cwiseAbs().maxCoeff();
    for (Index i : removed_) {
      if (std::abs(loading[i]) > cut) out.support.push_back(i);
    }
    std::sort(out.support.begin(), out.support.end());
    return out;
  }

  const Matrix& v_;
  const Matrix& working_;
  const Matrix& to_v_;
  const PursuitConfig& cfg_;
  const PursuitObserver& observer_;
  const Matrix& known_;
  const SelectionRule rule_;
  const Index n_;
  const Index p_;

  std::vector<char> retained_;
  std::vector<Index> removed_;
  const Matrix* src_ = nullptr;
  bool on_working_ = false;
  Matrix k_inv_;
  Vector leverage_;
  double scale_ = 1.0;
  double growth_ = 1.0;
  int cycles_ = 0;
};

}  // namespace

ColumnSolution pursue_column(const Matrix& v, const Matrix& working,
                             const PursuitConfig& cfg, const PursuitObserver& observer,
                             const Matrix& known) {
  cfg.validate();
  if (working.rows() != v.rows() || working.cols() != v.cols()) {
    throw DimensionError("pursue_column: working matrix shape differs from v");
  }
  if (v.cols() < 1 || v.rows() <= v.cols()) {
    throw DimensionError("pursue_column: need N > P >= 1, got N=" +
                         std::to_string(v.rows()) + " P=" + std::to_string(v.cols()));
  }
  if (known.size() != 0 && known.rows() != v.rows()) {
    throw DimensionError("pursue_column: known loadings have wrong length");
  }

  // working = v * to_v; maps null vectors of inflated rows back onto v.
  Matrix to_v = Matrix::Identity(v.cols(), v.cols());
  if (!(working == v)) {
    to_v = linalg::gram_inverse(v, cfg.tau_sing) * (v.transpose() * working);
  }

  std::vector<Index> seeds{-1};
  if (cfg.starts > 1) {
    // Seeds ranked by l1 norm of the working rows, lowest index on ties.
    const Vector l1 = working.cwiseAbs().rowwise().sum();
    seeds.assign(static_cast<std::size_t>(v.rows()), 0);
    std::iota(seeds.begin(), seeds.end(), Index{0});
    std::stable_sort(seeds.begin(), seeds.end(),
                     [&](Index a, Index b) { return l1[a] > l1[b]; });
    seeds.resize(std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(cfg.starts)));
  }
  std::vector<SelectionRule> rules{cfg.selection};
  if (cfg.selection == SelectionRule::Sparsest) {
    rules = {SelectionRule::SmallestAxis, SelectionRule::Leverage};
  }

  // Candidates rank by: not a duplicate, then not forced, then ||v b||_0
  // over all rows, then ||v b||_1 / ||v b||_2, which still separates
  // candidates once noise leaves no exact zeros. Earlier seeds and rules
  // win remaining ties.
  struct Rank {
    bool duplicate;
    bool forced;
    Index nonzeros;
    double spread;
    auto operator<=>(const Rank&) const = default;
  };
  std::optional<ColumnSolution> best;
  Rank best_rank{};
  for (Index seed : seeds) {
    for (SelectionRule rule : rules) {
      ColumnSolution sol = Pursuit(v, working, to_v, cfg, observer, known, rule).run(seed);
      const Vector loading = v * sol.b;
      const double cut = cfg.zero_tol * loading.cwiseAbs().maxCoeff();
      const Rank rank{known.cols() > 0 && max_abs_pearson(loading, known) >= 1.0 - cfg.epsilon_dup,
                      is_forced(sol, v),
                      (loading.array().abs() > cut).count(),
                      loading.lpNorm<1>() / loading.norm()};
      if (!best || rank < best_rank) {
        best = std::move(sol);
        best_rank = rank;
      }
    }
  }
  return *best;
}

BasisMatrix solve_basis(const Matrix& v, Index p_star, const PursuitConfig& cfg,
                        const PursuitObserver& observer) {
  cfg.validate();
  if (p_star < 1 || p_star > v.cols()) {
    throw DimensionError("solve_basis: p_star must lie in [1, columns of v]");
  }
  if (v.rows() <= p_star) throw DimensionError("solve_basis: need N > p_star");

  BasisMatrix basis;
  Matrix known(v.rows(), 0);
  auto accept = [&](ColumnSolution sol, const Vector& loading) {
    basis.columns.push_back(std::move(sol));
    known.conservativeResize(Eigen::NoChange, known.cols() + 1);
    known.col(known.cols() - 1) = loading;
  };

  for (Index col = 0; col < p_star; ++col) {
    if (basis.columns.empty()) {
      ColumnSolution sol = pursue_column(v, v, cfg, observer);
      const Vector loading = v * sol.b;
      accept(std::move(sol), loading);
      continue;
    }

    const Matrix working = inflate(v, basis);
    PursuitConfig attempt_cfg = cfg;
    bool accepted = false;
    for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
      ColumnSolution sol = pursue_column(v, working, attempt_cfg, observer, known);
      const Vector loading = v * sol.b;
      bool duplicate = max_abs_pearson(loading, known) >= 1.0 - cfg.epsilon_dup;
      if (!duplicate) {
        Matrix trial(v.cols(), basis.size() + 1);
        trial << basis.matrix(), sol.b;
        Eigen::JacobiSVD<Matrix> svd(trial);
        duplicate = svd.singularValues().minCoeff() <= cfg.tau_sing;
      }
      // A forced column is kept only once restarts run out; it is a valid
      // direction but carries no structure, so pruning usually removes it.
      const bool last = attempt == cfg.max_restarts;
      if (!duplicate && (!is_forced(sol, v) || last)) {
        accept(std::move(sol), loading);
        accepted = true;
        break;
      }
      if (attempt < cfg.max_restarts) {
        ++basis.restarts;
        attempt_cfg.k_switch *= 2;
      }
    }
    // Later columns would see the same inflated matrix and fail the same way.
    if (!accepted) {
      basis.dropped = static_cast<int>(p_star - basis.size());
      break;
    }
  }
  return basis;
}

}  // namespace sparsenet
