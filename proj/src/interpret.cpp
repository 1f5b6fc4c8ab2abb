#include "sparsenet/interpret.hpp"

#include "sparsenet/error.hpp"
#include "sparsenet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sparsenet::interpret {

void FactorMeasurement::validate(Index m) const {
  if (values.size() != config_indices.size()) {
    throw ParameterError("factor '" + label + "': values and indices differ in length");
  }
  if (values.size() < 3) {
    throw ParameterError("factor '" + label + "': need at least 3 measured configurations");
  }
  std::set<Index> seen;
  for (Index k : config_indices) {
    if (k < 0 || k >= m) {
      throw ParameterError("factor '" + label + "': configuration index out of range");
    }
    if (!seen.insert(k).second) {
      throw ParameterError("factor '" + label + "': repeated configuration index");
    }
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw ParameterError("factor '" + label + "': non-finite value");
  }
}

namespace {

Vector measured_values(const FactorMeasurement& meas) {
  return Eigen::Map<const Vector>(meas.values.data(), static_cast<Index>(meas.values.size()));
}

Matrix restricted(const Matrix& r_hat, const FactorMeasurement& meas) {
  Matrix out(static_cast<Index>(meas.config_indices.size()), r_hat.cols());
  for (std::size_t k = 0; k < meas.config_indices.size(); ++k) {
    out.row(static_cast<Index>(k)) = r_hat.row(meas.config_indices[k]);
  }
  return out;
}

double pearson(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(ca.dot(cb) / denom, -1.0, 1.0);
}

// |Pearson| of every measurement against every column on its configurations.
Matrix correlations(const Matrix& r_hat, const std::vector<FactorMeasurement>& measurements) {
  Matrix rho(static_cast<Index>(measurements.size()), r_hat.cols());
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const FactorMeasurement& meas = measurements[k];
    meas.validate(r_hat.rows());
    const Vector u = measured_values(meas);
    if (u.maxCoeff() == u.minCoeff()) {
      throw DegenerateError("factor '" + meas.label + "' is constant", static_cast<Index>(k));
    }
    const Matrix sub = restricted(r_hat, meas);
    for (Index j = 0; j < sub.cols(); ++j) {
      if (sub.col(j).maxCoeff() == sub.col(j).minCoeff()) {
        throw DegenerateError("column " + std::to_string(j) +
                                  " is constant on the configurations of '" + meas.label + "'",
                              j);
      }
      rho(static_cast<Index>(k), j) = std::abs(pearson(u, sub.col(j)));
    }
  }
  return rho;
}

FactorMatch finish(const Matrix& r_hat, const FactorMeasurement& meas, Index vertex,
                   double rho) {
  const Matrix sub = restricted(r_hat, meas);
  const Vector col = sub.col(vertex);
  return {vertex, rho, col.dot(measured_values(meas)) / col.squaredNorm()};
}

}  // namespace

FactorMatch match_factor(const Matrix& r_hat, const FactorMeasurement& meas) {
  if (r_hat.cols() < 1) throw DimensionError("match_factor: r_hat has no columns");
  const Matrix rho = correlations(r_hat, {meas});
  Index best = 0;
  rho.row(0).maxCoeff(&best);
  return finish(r_hat, meas, best, rho(0, best));
}

std::vector<FactorMatch> match_factors(const Matrix& r_hat,
                                       const std::vector<FactorMeasurement>& measurements) {
  if (measurements.empty()) throw ParameterError("match_factors: no measurements");
  if (r_hat.cols() < 1) throw DimensionError("match_factors: r_hat has no columns");
  const Matrix rho = correlations(r_hat, measurements);
  std::vector<FactorMatch> out(measurements.size());
  for (const auto& [k, j] : evaluation::max_assignment(rho)) {
    out[static_cast<std::size_t>(k)] =
        finish(r_hat, measurements[static_cast<std::size_t>(k)], j, rho(k, j));
  }
  return out;
}

namespace {

long double log_choose(Index n, Index k) {
  return std::lgamma(static_cast<long double>(n) + 1.0L) -
         std::lgamma(static_cast<long double>(k) + 1.0L) -
         std::lgamma(static_cast<long double>(n - k) + 1.0L);
}

long double log_sum_exp(const std::vector<long double>& terms) {
  const long double top = *std::max_element(terms.begin(), terms.end());
  long double sum = 0.0L;
  for (long double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

}  // namespace

double hypergeom_log_tail(Index population, Index set_a, Index set_b, Index overlap) {
  if (population < 0 || set_a < 0 || set_b < 0 || overlap < 0 || set_a > population ||
      set_b > population || overlap > std::min(set_a, set_b)) {
    throw ParameterError("hypergeom_log_tail: sizes violate 0 <= overlap <= set <= population");
  }
  const Index lo = std::max<Index>(0, set_a + set_b - population);
  const Index hi = std::min(set_a, set_b);
  if (overlap <= lo) return 0.0;

  const long double norm = log_choose(population, set_b);
  auto log_mass = [&](Index k) {
    return log_choose(set_a, k) + log_choose(population - set_a, set_b - k) - norm;
  };
  std::vector<long double> upper;
  for (Index k = overlap; k <= hi; ++k) upper.push_back(log_mass(k));
  const long double log_upper = log_sum_exp(upper);
  if (log_upper < std::log(0.5L)) return static_cast<double>(std::min(log_upper, 0.0L));

  // Large tails lose relative accuracy near 1; take the complement instead.
  std::vector<long double> lower;
  for (Index k = lo; k < overlap; ++k) lower.push_back(log_mass(k));
  const long double log_lower = log_sum_exp(lower);
  return static_cast<double>(std::min(std::log1p(-std::exp(log_lower)), 0.0L));
}

OverlapReport set_overlap_report(const std::vector<std::vector<Index>>& supports,
                                 const std::vector<NamedSet>& prior_sets, Index population) {
  auto check = [&](const std::vector<Index>& members) {
    for (Index x : members) {
      if (x < 0 || x >= population) {
        throw ParameterError("set_overlap_report: member outside the population");
      }
    }
  };
  std::vector<std::vector<Index>> sorted_sets;
  for (const NamedSet& s : prior_sets) {
    check(s.members);
    std::vector<Index> m = s.members;
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    sorted_sets.push_back(std::move(m));
  }

  OverlapReport report;
  Matrix score = Matrix::Zero(static_cast<Index>(supports.size()),
                              static_cast<Index>(prior_sets.size()));
  for (std::size_t r = 0; r < supports.size(); ++r) {
    check(supports[r]);
    std::vector<Index> sup = supports[r];
    std::sort(sup.begin(), sup.end());
    sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
    for (std::size_t s = 0; s < prior_sets.size(); ++s) {
      std::vector<Index> common;
      std::set_intersection(sup.begin(), sup.end(), sorted_sets[s].begin(),
                            sorted_sets[s].end(), std::back_inserter(common));
      OverlapTest t{population, static_cast<Index>(sup.size()),
                    static_cast<Index>(sorted_sets[s].size()),
                    static_cast<Index>(common.size()), 0.0};
      t.log_pval = hypergeom_log_tail(t.population, t.set_a_size, t.set_b_size, t.overlap);
      score(static_cast<Index>(r), static_cast<Index>(s)) = -t.log_pval;
      report.rows.push_back({static_cast<Index>(r), prior_sets[s].name, t});
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const OverlapRow& a, const OverlapRow& b) {
                     if (a.test.log_pval != b.test.log_pval) {
                       return a.test.log_pval < b.test.log_pval;
                     }
                     return a.test.overlap > b.test.overlap;
                   });
  if (score.size() > 0) {
    for (const auto& [r, s] : evaluation::max_assignment(score)) {
      report.best.emplace_back(r, prior_sets[static_cast<std::size_t>(s)].name);
    }
  }
  return report;
}

}  // namespace sparsenet::interpret
