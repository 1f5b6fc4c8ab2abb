#pragma once

#include "sparsenet/evaluation.hpp"
#include "sparsenet/interpret.hpp"
#include "sparsenet/linalg.hpp"
#include "sparsenet/netsim.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Text formats. Regulator, target, member and configuration ids are 1-based
// on disk and 0-based in memory.
namespace sparsenet::io {

/// Shortest representation that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

std::string read_file(const std::string& path);
/// Writes to a temporary file next to path, then renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Edge list with its header fields. topology is a free tag so inferred
/// networks ("inferred") share the format with simulated ones.
struct NetworkFile {
  Index n = 0;
  Index p = 0;
  std::string topology;
  std::uint64_t seed = 0;
  double degree = 0.0;
  std::vector<netsim::Edge> edges;

  Matrix adjacency() const;
  std::vector<std::vector<Index>> supports() const;
};

NetworkFile to_network_file(const netsim::NetworkModel& net);
/// Throws IoError if the topology tag is not a simulated one.
netsim::NetworkModel to_network_model(const NetworkFile& file);
/// Nonzero entries of a p x n matrix as edges.
NetworkFile network_from_matrix(const Matrix& c, const std::string& topology,
                                std::uint64_t seed);

std::string format_network(const NetworkFile& net);
NetworkFile parse_network(const std::string& text);

struct MatrixFile {
  std::string kind;  // "data" or "regulators"
  Matrix values;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Header "# data m=<M> n=<N> noise=<eta> seed=<s>" or
/// "# regulators m=<M> p=<P> seed=<s>", then one row per line.
std::string format_data(const Matrix& g, double noise, std::uint64_t seed);
std::string format_regulators(const Matrix& r, std::uint64_t seed);
MatrixFile parse_matrix(const std::string& text);

/// "set_name<TAB>member_id" per line.
std::vector<interpret::NamedSet> parse_prior_sets(const std::string& text);
std::string format_overlap_report(const interpret::OverlapReport& report);

/// "label<TAB>config_index<TAB>value" per line, grouped by label in order
/// of first appearance.
std::vector<interpret::FactorMeasurement> parse_measurements(const std::string& text);

std::string format_sweep(const std::vector<evaluation::SweepRow>& rows);
std::string format_aggregate(const std::vector<evaluation::SweepAggregate>& rows);

}  // namespace sparsenet::io
