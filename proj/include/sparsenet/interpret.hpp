#pragma once

#include "sparsenet/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sparsenet::interpret {

/// A physical factor measured in a few configurations: values[k] is the
/// state in configuration config_indices[k] (0-based rows of r_hat).
struct FactorMeasurement {
  std::vector<double> values;
  std::vector<Index> config_indices;
  std::string label;

  /// Throws ParameterError unless the invariants hold for m configurations.
  void validate(Index m) const;
};

struct FactorMatch {
  Index vertex = -1;  // column of r_hat
  double rho = 0.0;   // |Pearson|
  double scale = 0.0;
};

/// Column of r_hat whose restriction to the measured configurations best
/// correlates with the measurement, with its least-squares scale.
FactorMatch match_factor(const Matrix& r_hat, const FactorMeasurement& meas);

/// One-to-one assignment of measurements to columns maximizing the summed
/// |Pearson|; entry k belongs to measurements[k] (vertex -1 when there are
/// more measurements than columns).
std::vector<FactorMatch> match_factors(const Matrix& r_hat,
                                       const std::vector<FactorMeasurement>& measurements);

struct OverlapTest {
  Index population = 0;
  Index set_a_size = 0;
  Index set_b_size = 0;
  Index overlap = 0;
  double log_pval = 0.0;
};

/// ln Pr(X >= overlap) for X ~ Hypergeometric(population, set_a, set_b).
double hypergeom_log_tail(Index population, Index set_a, Index set_b, Index overlap);

struct NamedSet {
  std::string name;
  std::vector<Index> members;  // 0-based, distinct
};

struct OverlapRow {
  Index regulator = 0;
  std::string set_name;
  OverlapTest test;
};

struct OverlapReport {
  std::vector<OverlapRow> rows;  // ascending log_pval
  std::vector<std::pair<Index, std::string>> best;  // regulator -> set, by regulator
};

/// Scores every (regulator support, prior set) pair. Ties in log_pval are
/// broken by larger overlap, then regulator, then set order.
OverlapReport set_overlap_report(const std::vector<std::vector<Index>>& supports,
                                 const std::vector<NamedSet>& prior_sets, Index population);

}  // namespace sparsenet::interpret
