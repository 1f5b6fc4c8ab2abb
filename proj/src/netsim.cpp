#include "sparsenet/netsim.hpp"

#include "sparsenet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsenet::netsim {

namespace {

constexpr int kMaxAttempts = 1000;
constexpr std::uint64_t kDataStream = 0x5eed0000ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double draw_weight(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(kMinWeight, kMaxWeight);
  std::bernoulli_distribution negative(0.5);
  const double w = mag(rng);
  return negative(rng) ? -w : w;
}

void check_common(Index n, Index p, double mean_out_degree) {
  if (n < 1 || p < 1) throw ParameterError("network needs n >= 1 and p >= 1");
  if (!(mean_out_degree >= 1.0) || mean_out_degree > static_cast<double>(n)) {
    throw ParameterError("mean_out_degree must lie in [1, n]");
  }
}

void repair_regulators(std::vector<std::vector<char>>& present, Index n,
                       std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> pick_target(0, n - 1);
  for (auto& row : present) {
    if (std::none_of(row.begin(), row.end(), [](char c) { return c != 0; })) {
      row[static_cast<std::size_t>(pick_target(rng))] = 1;
    }
  }
}

// Gives every target without a regulator one uniform incoming edge.
void repair_targets(std::vector<std::vector<char>>& present, Index n, Index p,
                    std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> pick_regulator(0, p - 1);
  for (Index t = 0; t < n; ++t) {
    const auto col = static_cast<std::size_t>(t);
    const bool hit = std::any_of(present.begin(), present.end(),
                                 [col](const std::vector<char>& row) { return row[col] != 0; });
    if (!hit) present[static_cast<std::size_t>(pick_regulator(rng))][col] = 1;
  }
}

NetworkModel assemble(const std::vector<std::vector<char>>& present, Index n, Index p,
                      std::mt19937_64& rng) {
  NetworkModel net;
  net.n_observed = n;
  net.n_hidden = p;
  for (Index r = 0; r < p; ++r) {
    for (Index t = 0; t < n; ++t) {
      if (present[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)]) {
        net.edges.push_back({r, t, draw_weight(rng)});
      }
    }
  }
  return net;
}

bool degree_ok(std::size_t edges, Index p, double mean_out_degree) {
  const double realized = static_cast<double>(edges) / static_cast<double>(p);
  return std::abs(realized - mean_out_degree) <= kDegreeTolerance * mean_out_degree;
}

std::size_t count_edges(const std::vector<std::vector<char>>& present) {
  std::size_t total = 0;
  for (const auto& row : present) total += static_cast<std::size_t>(std::count(row.begin(), row.end(), 1));
  return total;
}

// Repairs empty regulators, then empty targets unless covering every target
// would push the mean degree out of tolerance. Returns false when the
// attempt has to be redrawn.
bool finalize_support(std::vector<std::vector<char>>& present, Index n, Index p,
                      double mean_out_degree, std::mt19937_64& rng) {
  repair_regulators(present, n, rng);
  std::vector<std::vector<char>> covered = present;
  repair_targets(covered, n, p, rng);
  if (degree_ok(count_edges(covered), p, mean_out_degree)) {
    present = std::move(covered);
    return true;
  }
  return degree_ok(count_edges(present), p, mean_out_degree);
}

}  // namespace

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t mixed = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(seed)};
  return std::mt19937_64(seq);
}

std::string NetworkModel::topology_tag() const {
  if (topology == Topology::Poisson) return "poisson";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, gamma);
  return "powerlaw(" + std::string(buf, res.ptr) + ")";
}

Matrix NetworkModel::adjacency() const {
  Matrix c = Matrix::Zero(n_hidden, n_observed);
  for (const Edge& e : edges) c(e.regulator, e.target) = e.weight;
  return c;
}

std::vector<Index> NetworkModel::out_degrees() const {
  std::vector<Index> deg(static_cast<std::size_t>(n_hidden), 0);
  for (const Edge& e : edges) ++deg[static_cast<std::size_t>(e.regulator)];
  return deg;
}

double NetworkModel::realized_mean_out_degree() const {
  if (n_hidden == 0) return 0.0;
  return static_cast<double>(edges.size()) / static_cast<double>(n_hidden);
}

std::vector<std::vector<Index>> NetworkModel::supports() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n_hidden));
  for (const Edge& e : edges) out[static_cast<std::size_t>(e.regulator)].push_back(e.target);
  for (auto& s : out) std::sort(s.begin(), s.end());
  return out;
}

NetworkModel gen_poisson_network(Index n, Index p, double mean_out_degree,
                                 std::uint64_t seed) {
  check_common(n, p, mean_out_degree);
  const double prob = mean_out_degree / static_cast<double>(n);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution edge(prob);
    std::vector<std::vector<char>> present(static_cast<std::size_t>(p),
                                           std::vector<char>(static_cast<std::size_t>(n), 0));
    for (auto& row : present) {
      for (auto& cell : row) cell = edge(rng) ? 1 : 0;
    }
    if (!finalize_support(present, n, p, mean_out_degree, rng)) continue;
    NetworkModel net = assemble(present, n, p, rng);
    net.topology = Topology::Poisson;
    net.mean_out_degree = mean_out_degree;
    net.seed = seed;
    return net;
  }
  throw ParameterError("gen_poisson_network: could not realize the requested mean degree");
}

double powerlaw_mean(Index d_min, Index n, double gamma) {
  double z = 0.0;
  double first = 0.0;
  for (Index d = d_min; d <= n; ++d) {
    const double w = std::pow(static_cast<double>(d), -gamma);
    z += w;
    first += w * static_cast<double>(d);
  }
  return first / z;
}

NetworkModel gen_powerlaw_network(Index n, Index p, double mean_out_degree, double gamma,
                                  std::uint64_t seed) {
  check_common(n, p, mean_out_degree);
  if (!(gamma > 1.0)) throw ParameterError("gen_powerlaw_network: gamma must exceed 1");

  // powerlaw_mean is increasing in d_min; pick the closest integer.
  Index d_min = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Index d = 1; d <= n; ++d) {
    const double gap = std::abs(powerlaw_mean(d, n, gamma) - mean_out_degree);
    if (gap < best_gap) {
      best_gap = gap;
      d_min = d;
    }
    if (powerlaw_mean(d, n, gamma) > mean_out_degree) break;
  }
  if (best_gap > kDegreeTolerance * mean_out_degree) {
    throw ParameterError("gen_powerlaw_network: no d_min gives mean degree " +
                         std::to_string(mean_out_degree) + " for gamma " +
                         std::to_string(gamma));
  }

  std::vector<double> weights;
  for (Index d = d_min; d <= n; ++d) weights.push_back(std::pow(static_cast<double>(d), -gamma));

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
    std::discrete_distribution<Index> degree(weights.begin(), weights.end());
    std::vector<std::vector<char>> present(static_cast<std::size_t>(p),
                                           std::vector<char>(static_cast<std::size_t>(n), 0));
    std::vector<Index> pool(static_cast<std::size_t>(n));
    for (auto& row : present) {
      const Index d = d_min + degree(rng);
      std::iota(pool.begin(), pool.end(), Index{0});
      // partial Fisher-Yates: the first d entries are a uniform sample
      for (Index k = 0; k < d; ++k) {
        std::uniform_int_distribution<Index> pick(k, n - 1);
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick(rng))]);
        row[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])] = 1;
      }
    }
    if (!finalize_support(present, n, p, mean_out_degree, rng)) continue;
    NetworkModel net = assemble(present, n, p, rng);
    net.topology = Topology::PowerLaw;
    net.gamma = gamma;
    net.mean_out_degree = mean_out_degree;
    net.seed = seed;
    return net;
  }
  throw ParameterError("gen_powerlaw_network: could not realize the requested mean degree");
}

SimulatedDataset simulate_data(const NetworkModel& net, Index m, double noise_level,
                               std::uint64_t seed) {
  if (m < 1) throw ParameterError("simulate_data: m must be >= 1");
  if (!(noise_level >= 0.0 && noise_level < 1.0)) {
    throw ParameterError("simulate_data: noise level must lie in [0, 1)");
  }
  SimulatedDataset out;
  out.noise_level = noise_level;
  out.seed = seed;

  std::mt19937_64 rng = make_rng(seed, kDataStream);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  out.r_gold.resize(m, net.n_hidden);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < net.n_hidden; ++j) out.r_gold(i, j) = unif(rng);
  }
  out.g = out.r_gold * net.adjacency();
  if (noise_level == 0.0) return out;

  const double mean = out.g.mean();
  const double sd = std::sqrt((out.g.array() - mean).square().mean());
  std::mt19937_64 noise_rng = make_rng(seed, kDataStream + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < out.g.cols(); ++j) out.g(i, j) += noise_level * sd * normal(noise_rng);
  }
  return out;
}

}  // namespace sparsenet::netsim
