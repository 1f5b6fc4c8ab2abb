#include "sparsenet/evaluation.hpp"

#include "sparsenet/decomposition.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsenet::evaluation {

Matrix row_normalize(const Matrix& c) {
  Matrix out(c.rows(), c.cols());
  for (Index i = 0; i < c.rows(); ++i) {
    const double mean = c.row(i).mean();
    const Eigen::RowVectorXd centered = c.row(i).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(c.cols()));
    if (!(sd > 0.0)) {
      throw DegenerateError("row_normalize: row " + std::to_string(i) + " is constant", i);
    }
    out.row(i) = centered / sd;
  }
  return out;
}

Matrix correlation_matrix(const Matrix& c_inf_nor, const Matrix& c_gold_nor) {
  if (c_inf_nor.cols() != c_gold_nor.cols()) {
    throw DimensionError("correlation_matrix: row lengths differ");
  }
  Matrix sigma = kernels::parallel::cross_correlation(c_inf_nor, c_gold_nor);
  return sigma.cwiseMax(-1.0).cwiseMin(1.0);
}

namespace {

// Hungarian method with potentials on an n x m cost matrix, n <= m,
// minimizing total cost. Returns the column assigned to each row.
std::vector<Index> hungarian_min(const Matrix& cost) {
  const Index n = cost.rows();
  const Index m = cost.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(m + 1), 0);    // row matched to column (1-based)
  std::vector<Index> way(static_cast<std::size_t>(m + 1), 0);

  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> row_to_col(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= m; ++j) {
    if (p[static_cast<std::size_t>(j)] != 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }
  return row_to_col;
}

double safe_scale(const Eigen::RowVectorXd& inferred, const Eigen::RowVectorXd& gold) {
  const double den = inferred.squaredNorm();
  return den > 0.0 ? inferred.dot(gold) / den : 0.0;
}

}  // namespace

std::vector<std::pair<Index, Index>> max_assignment(const Matrix& w) {
  std::vector<std::pair<Index, Index>> pairs;
  if (w.rows() == 0 || w.cols() == 0) return pairs;
  if (!w.allFinite()) throw ParameterError("max_assignment: non-finite weights");
  const bool transposed = w.rows() > w.cols();
  const Matrix cost = transposed ? Matrix(-w.cwiseAbs().transpose()) : Matrix(-w.cwiseAbs());
  const std::vector<Index> assign = hungarian_min(cost);
  for (Index i = 0; i < static_cast<Index>(assign.size()); ++i) {
    const Index j = assign[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    pairs.emplace_back(transposed ? j : i, transposed ? i : j);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

MatchResult match_rows(const Matrix& sigma) {
  MatchResult out;
  out.p_inferred = sigma.rows();
  out.pairs = max_assignment(sigma);
  double total = 0.0;
  for (const auto& [i, k] : out.pairs) {
    const double r = std::min(1.0, std::abs(sigma(i, k)));
    out.rho.push_back(r);
    total += r;
  }
  out.rho_bar = out.pairs.empty() ? 0.0 : total / static_cast<double>(out.pairs.size());
  return out;
}

MatchResult score_rows(const Matrix& c_inf, const Matrix& c_gold) {
  if (c_inf.cols() != c_gold.cols()) throw DimensionError("score_rows: N differs");
  const Matrix gold_nor = row_normalize(c_gold);

  Matrix inf_nor = Matrix::Zero(c_inf.rows(), c_inf.cols());
  for (Index i = 0; i < c_inf.rows(); ++i) {
    const double mean = c_inf.row(i).mean();
    const Eigen::RowVectorXd centered = c_inf.row(i).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(c_inf.cols()));
    if (sd > 0.0) inf_nor.row(i) = centered / sd;
  }

  MatchResult out = match_rows(correlation_matrix(inf_nor, gold_nor));
  for (const auto& [i, k] : out.pairs) out.scale.push_back(safe_scale(c_inf.row(i), c_gold.row(k)));
  return out;
}

EdgeMetrics edge_metrics(const MatchResult& match,
                         const std::vector<std::vector<Index>>& support_inf,
                         const std::vector<std::vector<Index>>& support_gold) {
  std::size_t tp = 0;
  std::size_t n_inf = 0;
  std::size_t n_gold = 0;
  for (const auto& [i, k] : match.pairs) {
    std::vector<Index> a = support_inf.at(static_cast<std::size_t>(i));
    std::vector<Index> b = support_gold.at(static_cast<std::size_t>(k));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<Index> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    tp += common.size();
    n_inf += a.size();
    n_gold += b.size();
  }
  EdgeMetrics m;
  m.precision = n_inf ? static_cast<double>(tp) / static_cast<double>(n_inf) : 0.0;
  m.recall = n_gold ? static_cast<double>(tp) / static_cast<double>(n_gold) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::string axis_name(Axis axis) {
  switch (axis) {
    case Axis::P: return "P";
    case Axis::M: return "M";
    case Axis::N: return "N";
    case Axis::Noise: return "noise";
    case Axis::Degree: return "degree";
  }
  return "?";
}

Axis parse_axis(const std::string& name) {
  if (name == "P" || name == "p") return Axis::P;
  if (name == "M" || name == "m") return Axis::M;
  if (name == "N" || name == "n") return Axis::N;
  if (name == "noise") return Axis::Noise;
  if (name == "degree") return Axis::Degree;
  throw ParameterError("unknown sweep axis '" + name + "'");
}

SweepParams apply_axis(const SweepParams& fixed, Axis axis, double value) {
  SweepParams p = fixed;
  switch (axis) {
    case Axis::P: p.p = static_cast<Index>(std::llround(value)); break;
    case Axis::M: p.m = static_cast<Index>(std::llround(value)); break;
    case Axis::N: p.n = static_cast<Index>(std::llround(value)); break;
    case Axis::Noise: p.noise = value; break;
    case Axis::Degree: p.degree_fraction = value; break;
  }
  return p;
}

SweepRow run_cell(const SweepParams& params, Axis axis, double value, std::uint64_t seed,
                  const PursuitConfig& cfg, bool timing) {
  SweepRow row{axis, value, seed, std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN(), 0, 0.0, {}};
  const auto start = std::chrono::steady_clock::now();
  try {
    const double degree = params.degree_fraction * static_cast<double>(params.n);
    const netsim::NetworkModel net =
        params.topology == netsim::Topology::Poisson
            ? netsim::gen_poisson_network(params.n, params.p, degree, seed)
            : netsim::gen_powerlaw_network(params.n, params.p, degree, params.gamma, seed);
    const netsim::SimulatedDataset data = netsim::simulate_data(net, params.m, params.noise, seed);
    const Index p_star = params.p_star > 0 ? params.p_star : params.p;
    const Factorization f = infer_network(data.g, p_star, cfg);
    const MatchResult match = score_rows(f.c_hat, net.adjacency());
    row.rho_bar = match.rho_bar;
    row.f1 = edge_metrics(match, f.support, net.supports()).f1;
    row.p_inferred = f.regulators();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  if (timing) {
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<SweepRow> benchmark_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw ParameterError("benchmark_sweep: empty grid");
  if (spec.seeds.empty()) throw ParameterError("benchmark_sweep: need at least one seed");
  spec.pursuit.validate();

  const std::size_t n_seeds = spec.seeds.size();
  const std::size_t cells = spec.grid.size() * n_seeds;
  std::vector<SweepRow> rows(cells);
  const int jobs = std::max(1, spec.jobs);

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::size_t c = 0; c < cells; ++c) {
    const double value = spec.grid[c / n_seeds];
    const std::uint64_t seed = spec.seeds[c % n_seeds];
    rows[c] = run_cell(apply_axis(spec.fixed, spec.axis, value), spec.axis, value, seed,
                       spec.pursuit, spec.timing);
  }
  return rows;
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  for (std::size_t start = 0; start < rows.size();) {
    std::size_t end = start;
    std::vector<double> vals;
    while (end < rows.size() && rows[end].value == rows[start].value &&
           rows[end].axis == rows[start].axis) {
      if (rows[end].error.empty()) vals.push_back(rows[end].rho_bar);
      ++end;
    }
    SweepAggregate a{rows[start].axis, rows[start].value,
                     std::numeric_limits<double>::quiet_NaN(), 0.0,
                     static_cast<int>(vals.size())};
    if (!vals.empty()) {
      a.mean_rho = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - a.mean_rho) * (v - a.mean_rho);
        a.std_rho = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      }
    }
    out.push_back(a);
    start = end;
  }
  return out;
}

}  // namespace sparsenet::evaluation
