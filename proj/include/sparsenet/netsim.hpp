#pragma once

#include "sparsenet/linalg.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sparsenet::netsim {

/// Seeds an independent generator for stream `stream` of a run seeded
/// with `seed` (splitmix64 mixing), so parallel sweeps stay reproducible.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

enum class Topology { Poisson, PowerLaw };

struct Edge {
  Index regulator;  // 0-based, < n_hidden
  Index target;     // 0-based, < n_observed
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct NetworkModel {
  Index n_observed = 0;  // N
  Index n_hidden = 0;    // P
  std::vector<Edge> edges;  // sorted by (regulator, target)
  Topology topology = Topology::Poisson;
  double gamma = 0.0;  // power-law exponent; 0 for Poisson
  double mean_out_degree = 0.0;
  std::uint64_t seed = 0;

  /// "poisson" or "powerlaw(<gamma>)".
  std::string topology_tag() const;
  /// Dense P x N weighted adjacency.
  Matrix adjacency() const;
  double realized_mean_out_degree() const;
  std::vector<Index> out_degrees() const;
  /// 0-based targets of every regulator.
  std::vector<std::vector<Index>> supports() const;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

struct SimulatedDataset {
  Matrix g;       // M x N
  Matrix r_gold;  // M x P
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kMinWeight = 0.2;
inline constexpr double kMaxWeight = 1.0;
inline constexpr double kDegreeTolerance = 0.15;

/// Erdos-Renyi bipartite graph: each (regulator, target) pair is an edge
/// with probability mean_out_degree / n.
NetworkModel gen_poisson_network(Index n, Index p, double mean_out_degree,
                                 std::uint64_t seed);

/// Regulator out-degrees drawn from Pr(d) ~ d^-gamma on [d_min, n], with
/// d_min chosen so the expected degree is closest to mean_out_degree;
/// targets drawn uniformly without replacement.
NetworkModel gen_powerlaw_network(Index n, Index p, double mean_out_degree,
                                  double gamma, std::uint64_t seed);

/// Expected degree of the truncated discrete power law on [d_min, n].
double powerlaw_mean(Index d_min, Index n, double gamma);

/// g = r_gold * C + noise, r_gold ~ U[0,1), noise ~ N(0, (eta * sd)^2) where
/// sd is the population standard deviation of the noiseless entries.
SimulatedDataset simulate_data(const NetworkModel& net, Index m, double noise_level,
                               std::uint64_t seed);

}  // namespace sparsenet::netsim
