#pragma once

#include "sparsenet/linalg.hpp"

#include <functional>
#include <vector>

namespace sparsenet {

enum class SwitchMode {
  // Leave the inflated matrix after a fixed number of cycles.
  FixedCycles,
  // Leave once the best correlation with known columns drops below
  // 1 - epsilon_dup and is still decreasing.
  CorrelationMonitor,
};

/// How the next row leaving the retained set is chosen.
enum class SelectionRule {
  // Largest |entry| of the left singular vector of V0 with the smallest
  // singular value.
  SmallestAxis,
  // Largest leverage w_i^T (V0^T V0)^-1 w_i; reduces to SmallestAxis as V0
  // approaches singularity.
  Leverage,
  // Run both and keep the candidate with the sparsest loading v*b.
  Sparsest,
};

struct PursuitConfig {
  double tau_sing = 1e-10;
  double tau_conv = 1e-10;
  int k_switch = 10;
  double epsilon_dup = 0.01;
  double zero_tol = 1e-8;
  int max_restarts = 3;
  // Number of seed rows tried (largest l1 norm first). Candidates that do
  // not duplicate a known column win, then those whose retained set is not
  // singular by dimension count alone, then the sparsest loading v*b.
  int starts = 3;
  SelectionRule selection = SelectionRule::Sparsest;
  SwitchMode switch_mode = SwitchMode::FixedCycles;
  linalg::PowerOptions power{};

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

/// What ended a pursuit.
enum class StopReason { Singular, Stagnated };

struct ColumnSolution {
  Vector b;                     // unit P-vector
  std::vector<Index> support;   // sorted, 0-based rows of v*b that are nonzero
  std::vector<Index> removed;   // rows in the order they left the retained set
  double smallest_singular = 0.0;
  int cycles = 0;
  StopReason stop = StopReason::Singular;
  SelectionRule rule = SelectionRule::SmallestAxis;  // rule that produced it

};

/// Snapshot handed to a PursuitObserver after every index move.
struct CycleState {
  int cycle;
  const Matrix& k_inv;              // current (V0^T V0)^-1
  const Matrix& source;             // matrix whose retained rows form V0
  const std::vector<char>& retained;
  bool inflated;                    // still pursuing on the inflated matrix
};

using PursuitObserver = std::function<void(const CycleState&)>;

/// Greedy null-space pursuit for one column of the basis rotation.
///
/// `v` (N x P, orthonormal columns) defines the problem; `working` is the
/// matrix the removal order is computed on (v itself for the first column,
/// the inflated matrix afterwards). With an inflated working matrix the
/// pursuit moves back to `v` after cfg.k_switch cycles. Performs at most
/// N - P + 1 index moves.
///
/// `known` (N x q) holds the loadings v*b of columns found earlier; it is
/// only read in SwitchMode::CorrelationMonitor.
ColumnSolution pursue_column(const Matrix& v, const Matrix& working,
                             const PursuitConfig& cfg,
                             const PursuitObserver& observer = {},
                             const Matrix& known = Matrix());

inline ColumnSolution pursue_column(const Matrix& v, const PursuitConfig& cfg,
                                    const PursuitObserver& observer = {}) {
  return pursue_column(v, v, cfg, observer);
}

struct BasisMatrix {
  std::vector<ColumnSolution> columns;
  int dropped = 0;    // candidates rejected as duplicates after all restarts
  int restarts = 0;   // duplicate re-pursuits across all columns

  Index size() const { return static_cast<Index>(columns.size()); }
  /// P x p matrix with one found column per regulator.
  Matrix matrix() const;
};

/// v + sum over previous columns b of (v b) b^T.
Matrix inflate(const Matrix& v, const BasisMatrix& previous);

/// Finds up to p_star sparsifying columns for v.
BasisMatrix solve_basis(const Matrix& v, Index p_star, const PursuitConfig& cfg,
                        const PursuitObserver& observer = {});

/// |Pearson| between two vectors; 0 if either is constant.
double abs_pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

}  // namespace sparsenet
