#pragma once

#include "sparsenet/linalg.hpp"
#include "sparsenet/netsim.hpp"
#include "sparsenet/sparse_basis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sparsenet::evaluation {

struct MatchResult {
  std::vector<std::pair<Index, Index>> pairs;  // (inferred row, gold row)
  std::vector<double> rho;                     // |Pearson| per pair
  std::vector<double> scale;                   // gold ~ scale * inferred, per pair
  double rho_bar = 0.0;
  Index p_inferred = 0;
};

struct EdgeMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Rows shifted to mean 0 and scaled to unit population variance. Throws
/// DegenerateError naming the first constant row.
Matrix row_normalize(const Matrix& c);

/// Pearson correlations between rows of two row-normalized matrices.
Matrix correlation_matrix(const Matrix& c_inf_nor, const Matrix& c_gold_nor);

/// Maximum-weight one-to-one assignment on |w| (Hungarian method); returns
/// (row, column) pairs sorted by row. Matches min(rows, cols) pairs.
std::vector<std::pair<Index, Index>> max_assignment(const Matrix& w);

/// Optimal one-to-one matching of inferred rows (sigma rows) to gold rows.
/// Scales are left empty; see score_rows.
MatchResult match_rows(const Matrix& sigma);

/// Normalizes both matrices, correlates and matches them. Constant inferred
/// rows get zero correlation with every gold row. Scales are least-squares
/// factors on the raw rows.
MatchResult score_rows(const Matrix& c_inf, const Matrix& c_gold);

/// Precision and recall of inferred edges against gold edges, pooled over
/// the matched pairs.
EdgeMetrics edge_metrics(const MatchResult& match,
                         const std::vector<std::vector<Index>>& support_inf,
                         const std::vector<std::vector<Index>>& support_gold);

enum class Axis { P, M, N, Noise, Degree };

std::string axis_name(Axis axis);
Axis parse_axis(const std::string& name);

struct SweepParams {
  Index n = 200;
  Index p = 10;
  Index m = 150;
  double degree_fraction = 0.1;  // mean out-degree as a fraction of n
  netsim::Topology topology = netsim::Topology::Poisson;
  double gamma = 2.5;
  double noise = 0.1;
  Index p_star = 0;  // 0: use p
};

struct SweepSpec {
  Axis axis = Axis::P;
  std::vector<double> grid;
  SweepParams fixed;
  std::vector<std::uint64_t> seeds;
  PursuitConfig pursuit;
  bool timing = false;  // record wall-clock seconds (otherwise 0)
  int jobs = 1;
};

struct SweepRow {
  Axis axis;
  double value;
  std::uint64_t seed;
  double rho_bar;
  double f1;
  Index p_inferred;
  double seconds;
  std::string error;  // empty on success
};

struct SweepAggregate {
  Axis axis;
  double value;
  double mean_rho;
  double std_rho;  // sample standard deviation, 0 for one seed
  int n_seeds;     // successful seeds
};

/// Parameters of one cell with the axis value applied.
SweepParams apply_axis(const SweepParams& fixed, Axis axis, double value);

/// Generates, infers and scores one instance.
SweepRow run_cell(const SweepParams& params, Axis axis, double value, std::uint64_t seed,
                  const PursuitConfig& cfg, bool timing);

/// Every (grid value, seed) cell, ordered by grid then seed regardless of
/// how many jobs ran them.
std::vector<SweepRow> benchmark_sweep(const SweepSpec& spec);

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows);

}  // namespace sparsenet::evaluation
