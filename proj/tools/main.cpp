#include "sparsenet/decomposition.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/evaluation.hpp"
#include "sparsenet/interpret.hpp"
#include "sparsenet/io.hpp"
#include "sparsenet/netsim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

using namespace sparsenet;
using nlohmann::ordered_json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

const std::map<std::string, SelectionRule> kRules{
    {"smallest-axis", SelectionRule::SmallestAxis},
    {"leverage", SelectionRule::Leverage},
    {"sparsest", SelectionRule::Sparsest}};
const std::map<std::string, SwitchMode> kSwitchModes{
    {"fixed", SwitchMode::FixedCycles}, {"monitor", SwitchMode::CorrelationMonitor}};
const std::map<std::string, netsim::Topology> kTopologies{
    {"poisson", netsim::Topology::Poisson}, {"powerlaw", netsim::Topology::PowerLaw}};

template <typename T>
std::string name_of(const std::map<std::string, T>& names, T value) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

struct PursuitFlags {
  PursuitConfig cfg;
  double prune_threshold = PruneOptions{}.threshold;
};

void add_pursuit_flags(CLI::App* cmd, PursuitFlags& f) {
  cmd->add_option("--tau-sing", f.cfg.tau_sing, "Singularity threshold on 1/lambda_max")
      ->capture_default_str();
  cmd->add_option("--tau-conv", f.cfg.tau_conv, "Eigenvector stagnation threshold")
      ->capture_default_str();
  cmd->add_option("--k-switch", f.cfg.k_switch, "Cycles on the inflated matrix")
      ->capture_default_str();
  cmd->add_option("--epsilon-dup", f.cfg.epsilon_dup, "Duplicate-column correlation tolerance")
      ->capture_default_str();
  cmd->add_option("--zero-tol", f.cfg.zero_tol, "Relative threshold for zero loadings")
      ->capture_default_str();
  cmd->add_option("--max-restarts", f.cfg.max_restarts, "Re-pursuits of a rejected column")
      ->capture_default_str();
  cmd->add_option("--starts", f.cfg.starts, "Seed rows tried per column")->capture_default_str();
  cmd->add_option("--selection", f.cfg.selection, "Row selection rule")
      ->transform(CLI::CheckedTransformer(kRules, CLI::ignore_case))
      ->default_str(name_of(kRules, f.cfg.selection));
  cmd->add_option("--switch-mode", f.cfg.switch_mode, "When to leave the inflated matrix")
      ->transform(CLI::CheckedTransformer(kSwitchModes, CLI::ignore_case))
      ->default_str(name_of(kSwitchModes, f.cfg.switch_mode));
  cmd->add_option("--prune-threshold", f.prune_threshold, "Regulator pruning threshold")
      ->capture_default_str();
}

ordered_json pursuit_json(const PursuitFlags& f) {
  return {{"tau_sing", f.cfg.tau_sing},
          {"tau_conv", f.cfg.tau_conv},
          {"k_switch", f.cfg.k_switch},
          {"epsilon_dup", f.cfg.epsilon_dup},
          {"zero_tol", f.cfg.zero_tol},
          {"max_restarts", f.cfg.max_restarts},
          {"starts", f.cfg.starts},
          {"selection", name_of(kRules, f.cfg.selection)},
          {"switch_mode", name_of(kSwitchModes, f.cfg.switch_mode)},
          {"prune_threshold", f.prune_threshold}};
}

// --seed, else SPARSENET_SEED, else 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPARSENET_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("SPARSENET_SEED is not an unsigned integer");
  }
  return 1;
}

void write_json(const std::string& path, const ordered_json& doc) {
  io::write_file_atomic(path, doc.dump(2) + "\n");
}

ordered_json base_report(const std::string& command) {
  return {{"command", command}, {"version", SPARSENET_VERSION}};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ordered_json match_json(const evaluation::MatchResult& match) {
  ordered_json pairs = ordered_json::array();
  for (std::size_t k = 0; k < match.pairs.size(); ++k) {
    pairs.push_back({{"inferred", match.pairs[k].first + 1},
                     {"gold", match.pairs[k].second + 1},
                     {"rho", match.rho[k]},
                     {"scale", match.scale[k]}});
  }
  return {{"rho_bar", match.rho_bar}, {"p_inferred", match.p_inferred}, {"pairs", pairs}};
}

// ---- simulate ----

struct SimulateOpts {
  std::string topology = "poisson";
  Index n = 200;
  Index p = 10;
  double degree = 20.0;
  double gamma = 2.5;
  Index m = 150;
  double noise = 0.1;
  std::optional<std::uint64_t> seed;
  std::string network = "network.tsv";
  std::string data = "data.tsv";
  std::string regulators = "regulators.tsv";
  std::string report;
};

void run_simulate(const SimulateOpts& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const netsim::NetworkModel net =
      kTopologies.at(o.topology) == netsim::Topology::Poisson
          ? netsim::gen_poisson_network(o.n, o.p, o.degree, seed)
          : netsim::gen_powerlaw_network(o.n, o.p, o.degree, o.gamma, seed);
  const netsim::SimulatedDataset data = netsim::simulate_data(net, o.m, o.noise, seed);

  io::write_file_atomic(o.network, io::format_network(io::to_network_file(net)));
  io::write_file_atomic(o.data, io::format_data(data.g, o.noise, seed));
  io::write_file_atomic(o.regulators, io::format_regulators(data.r_gold, seed));
  if (!o.report.empty()) {
    ordered_json doc = base_report("simulate");
    doc["config"] = {{"topology", o.topology}, {"n", o.n},           {"p", o.p},
                     {"degree", o.degree},     {"gamma", o.gamma},   {"m", o.m},
                     {"noise", o.noise},       {"seed", seed},       {"network", o.network},
                     {"data", o.data},         {"regulators", o.regulators}};
    doc["edges"] = net.edges.size();
    doc["realized_mean_out_degree"] = net.realized_mean_out_degree();
    write_json(o.report, doc);
  }
}

// ---- infer ----

struct InferOpts {
  std::string data;
  Index p_star = 0;
  Index p_guess = 0;
  PursuitFlags pursuit;
  std::string c_out = "c_hat.tsv";
  std::string r_out = "r_hat.tsv";
  std::string report = "infer_report.json";
  std::string gold;
  bool timing = false;
};

void run_infer(const InferOpts& o) {
  const io::MatrixFile data = io::parse_matrix(io::read_file(o.data));
  if (data.kind != "data") throw IoError("'" + o.data + "' is not a data file");
  Index p_star = o.p_star;
  if (p_star == 0) {
    if (o.p_guess == 0) throw ParameterError("give --p-star or --p-guess");
    p_star = default_p_star(o.p_guess);
  }
  std::optional<io::NetworkFile> gold;
  if (!o.gold.empty()) gold = io::parse_network(io::read_file(o.gold));

  const auto start = Clock::now();
  const Factorization f = infer_network(data.values, p_star, o.pursuit.cfg, {},
                                        PruneOptions{o.pursuit.prune_threshold});
  const double wall = seconds_since(start);

  io::write_file_atomic(o.c_out,
                        io::format_network(io::network_from_matrix(f.c_hat, "inferred", data.seed)));
  io::write_file_atomic(o.r_out, io::format_regulators(f.r_hat, data.seed));

  ordered_json doc = base_report("infer");
  doc["config"] = {{"data", o.data},         {"p_star", p_star},  {"p_guess", o.p_guess},
                   {"pursuit", pursuit_json(o.pursuit)},          {"c_out", o.c_out},
                   {"r_out", o.r_out},       {"gold", o.gold},    {"timing", o.timing}};
  doc["seed"] = data.seed;
  doc["p_inferred"] = f.regulators();
  doc["pruned"] = f.pruned;
  doc["dropped"] = f.dropped;
  doc["residual_fro"] = f.residual_fro;
  doc["nonzeros"] = f.nonzeros();
  if (gold) {
    const auto match = evaluation::score_rows(f.c_hat, gold->adjacency());
    doc["evaluation"] = match_json(match);
    doc["evaluation"]["f1"] = evaluation::edge_metrics(match, f.support, gold->supports()).f1;
  }
  if (o.timing) doc["seconds"] = wall;
  write_json(o.report, doc);
}

// ---- evaluate ----

struct EvaluateOpts {
  std::string inferred;
  std::string gold;
  std::string report = "evaluate_report.json";
};

void run_evaluate(const EvaluateOpts& o) {
  const io::NetworkFile inf = io::parse_network(io::read_file(o.inferred));
  const io::NetworkFile gold = io::parse_network(io::read_file(o.gold));
  if (inf.n != gold.n) throw DimensionError("inferred and gold networks differ in n");
  const auto match = evaluation::score_rows(inf.adjacency(), gold.adjacency());
  const auto edges = evaluation::edge_metrics(match, inf.supports(), gold.supports());

  ordered_json doc = base_report("evaluate");
  doc["config"] = {{"inferred", o.inferred}, {"gold", o.gold}};
  doc["seed"] = gold.seed;
  doc.update(match_json(match));
  doc["precision"] = edges.precision;
  doc["recall"] = edges.recall;
  doc["f1"] = edges.f1;
  write_json(o.report, doc);
  std::cout << "rho_bar " << io::format_double(match.rho_bar) << "\n";
}

// ---- benchmark ----

struct BenchmarkOpts {
  std::string axis = "p";
  std::vector<double> grid{5, 10, 20};
  evaluation::SweepParams fixed;
  std::string topology = "poisson";
  std::vector<std::uint64_t> seeds;
  int n_seeds = 5;
  std::optional<std::uint64_t> seed;
  PursuitFlags pursuit;
  int jobs = 1;
  bool timing = false;
  std::string out = "sweep.csv";
  std::string aggregate = "aggregate.csv";
  std::string report;
};

void run_benchmark(BenchmarkOpts o) {
  evaluation::SweepSpec spec;
  spec.axis = evaluation::parse_axis(o.axis);
  spec.grid = o.grid;
  spec.fixed = o.fixed;
  spec.fixed.topology = kTopologies.at(o.topology);
  if (o.seeds.empty()) {
    if (o.n_seeds < 1) throw ParameterError("--n-seeds must be >= 1");
    const std::uint64_t base = resolve_seed(o.seed);
    for (int k = 0; k < o.n_seeds; ++k) o.seeds.push_back(base + static_cast<std::uint64_t>(k));
  }
  spec.seeds = o.seeds;
  spec.pursuit = o.pursuit.cfg;
  spec.timing = o.timing;
  spec.jobs = o.jobs;

  const auto rows = evaluation::benchmark_sweep(spec);
  const auto agg = evaluation::aggregate(rows);
  io::write_file_atomic(o.out, io::format_sweep(rows));
  io::write_file_atomic(o.aggregate, io::format_aggregate(agg));
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      std::cerr << "cell " << o.axis << "=" << io::format_double(r.value) << " seed " << r.seed
                << ": " << r.error << "\n";
    }
  }
  if (!o.report.empty()) {
    ordered_json doc = base_report("benchmark");
    const auto& fx = spec.fixed;
    doc["config"] = {{"axis", o.axis},
                     {"grid", o.grid},
                     {"seeds", o.seeds},
                     {"n", fx.n},
                     {"p", fx.p},
                     {"m", fx.m},
                     {"degree_fraction", fx.degree_fraction},
                     {"topology", o.topology},
                     {"gamma", fx.gamma},
                     {"noise", fx.noise},
                     {"p_star", fx.p_star},
                     {"pursuit", pursuit_json(o.pursuit)},
                     {"jobs", o.jobs},
                     {"timing", o.timing},
                     {"out", o.out},
                     {"aggregate", o.aggregate}};
    doc["cells"] = rows.size();
    doc["failed_cells"] = failures;
    write_json(o.report, doc);
  }
}

// ---- match-factors ----

struct MatchFactorsOpts {
  std::string r_hat;
  std::string measurements;
  std::string report = "match_factors.json";
};

void run_match_factors(const MatchFactorsOpts& o) {
  const io::MatrixFile r = io::parse_matrix(io::read_file(o.r_hat));
  const auto meas = io::parse_measurements(io::read_file(o.measurements));
  const auto matches = interpret::match_factors(r.values, meas);

  ordered_json doc = base_report("match-factors");
  doc["config"] = {{"r_hat", o.r_hat}, {"measurements", o.measurements}};
  ordered_json list = ordered_json::array();
  for (std::size_t k = 0; k < meas.size(); ++k) {
    const auto& mt = matches[k];
    list.push_back({{"label", meas[k].label},
                    {"n_measured", meas[k].values.size()},
                    {"vertex", mt.vertex < 0 ? ordered_json(nullptr) : ordered_json(mt.vertex + 1)},
                    {"rho", mt.rho},
                    {"scale", mt.scale}});
  }
  doc["matches"] = list;
  write_json(o.report, doc);
}

// ---- overlap ----

struct OverlapOpts {
  std::string network;
  std::string prior_sets;
  Index population = 0;
  std::string out = "overlap.tsv";
  std::string report;
};

void run_overlap(const OverlapOpts& o) {
  const io::NetworkFile net = io::parse_network(io::read_file(o.network));
  const auto sets = io::parse_prior_sets(io::read_file(o.prior_sets));
  const Index population = o.population > 0 ? o.population : net.n;
  const auto report = interpret::set_overlap_report(net.supports(), sets, population);
  io::write_file_atomic(o.out, io::format_overlap_report(report));
  if (!o.report.empty()) {
    ordered_json doc = base_report("overlap");
    doc["config"] = {{"network", o.network},
                     {"prior_sets", o.prior_sets},
                     {"population", population},
                     {"out", o.out}};
    ordered_json best = ordered_json::array();
    for (const auto& [reg, name] : report.best) best.push_back({{"regulator", reg + 1}, {"set", name}});
    doc["best_assignment"] = best;
    write_json(o.report, doc);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse bipartite network inference from observed data"};
  app.set_version_flag("--version", std::string(SPARSENET_VERSION));
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a planted network and data");
  c_sim->add_option("--topology", sim.topology, "poisson or powerlaw")
      ->check(CLI::IsMember({"poisson", "powerlaw"}))
      ->capture_default_str();
  c_sim->add_option("--n", sim.n, "Observed variables N")->capture_default_str();
  c_sim->add_option("--p", sim.p, "Hidden regulators P")->capture_default_str();
  c_sim->add_option("--degree", sim.degree, "Mean regulator out-degree")->capture_default_str();
  c_sim->add_option("--gamma", sim.gamma, "Power-law exponent")->capture_default_str();
  c_sim->add_option("--m", sim.m, "Configurations M")->capture_default_str();
  c_sim->add_option("--noise", sim.noise, "Noise level eta")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Seed (default: $SPARSENET_SEED, else 1)");
  c_sim->add_option("--network", sim.network, "Gold network output")->capture_default_str();
  c_sim->add_option("--data", sim.data, "Data matrix output")->capture_default_str();
  c_sim->add_option("--regulators", sim.regulators, "Gold regulator activities output")
      ->capture_default_str();
  c_sim->add_option("--report", sim.report, "Optional JSON report");

  InferOpts inf;
  auto* c_inf = app.add_subcommand("infer", "Infer network and regulator activities");
  c_inf->add_option("--data", inf.data, "Data matrix file")->required();
  auto* ps = c_inf->add_option("--p-star", inf.p_star, "Number of singular pairs kept");
  c_inf->add_option("--p-guess", inf.p_guess, "Guess of P; p_star = ceil(1.25 guess) + 2")
      ->excludes(ps);
  add_pursuit_flags(c_inf, inf.pursuit);
  c_inf->add_option("--c-out", inf.c_out, "Inferred network output")->capture_default_str();
  c_inf->add_option("--r-out", inf.r_out, "Inferred activities output")->capture_default_str();
  c_inf->add_option("--report", inf.report, "JSON report")->capture_default_str();
  c_inf->add_option("--gold", inf.gold, "Gold network to score against");
  c_inf->add_flag("--timing", inf.timing, "Record wall time in the report");

  EvaluateOpts ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score an inferred network against a gold one");
  c_ev->add_option("--inferred", ev.inferred, "Inferred network")->required();
  c_ev->add_option("--gold", ev.gold, "Gold network")->required();
  c_ev->add_option("--report", ev.report, "JSON report")->capture_default_str();

  BenchmarkOpts bm;
  auto* c_bm = app.add_subcommand("benchmark", "Accuracy sweep over one parameter");
  c_bm->add_option("--axis", bm.axis, "p, m, n, noise or degree")
      ->check(CLI::IsMember({"p", "m", "n", "noise", "degree"}))
      ->capture_default_str();
  c_bm->add_option("--grid", bm.grid, "Axis values")->delimiter(',')->capture_default_str();
  c_bm->add_option("--n", bm.fixed.n, "Observed variables N")->capture_default_str();
  c_bm->add_option("--p", bm.fixed.p, "Hidden regulators P")->capture_default_str();
  c_bm->add_option("--m", bm.fixed.m, "Configurations M")->capture_default_str();
  c_bm->add_option("--degree", bm.fixed.degree_fraction, "Mean out-degree as a fraction of N")
      ->capture_default_str();
  c_bm->add_option("--topology", bm.topology, "poisson or powerlaw")
      ->check(CLI::IsMember({"poisson", "powerlaw"}))
      ->capture_default_str();
  c_bm->add_option("--gamma", bm.fixed.gamma, "Power-law exponent")->capture_default_str();
  c_bm->add_option("--noise", bm.fixed.noise, "Noise level eta")->capture_default_str();
  c_bm->add_option("--p-star", bm.fixed.p_star, "Singular pairs kept (0: use P)")
      ->capture_default_str();
  auto* seeds = c_bm->add_option("--seeds", bm.seeds, "Explicit seed list")->delimiter(',');
  c_bm->add_option("--n-seeds", bm.n_seeds, "Consecutive seeds from --seed")
      ->capture_default_str()
      ->excludes(seeds);
  c_bm->add_option("--seed", bm.seed, "First seed (default: $SPARSENET_SEED, else 1)")
      ->excludes(seeds);
  add_pursuit_flags(c_bm, bm.pursuit);
  c_bm->add_option("--jobs", bm.jobs, "Worker threads")->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_bm->add_flag("--timing", bm.timing, "Record wall time per cell (otherwise 0)");
  c_bm->add_option("--out", bm.out, "Per-cell CSV")->capture_default_str();
  c_bm->add_option("--aggregate", bm.aggregate, "Per-grid-point CSV")->capture_default_str();
  c_bm->add_option("--report", bm.report, "Optional JSON report");

  MatchFactorsOpts mf;
  auto* c_mf = app.add_subcommand("match-factors", "Match measured factors to inferred regulators");
  c_mf->add_option("--r-hat", mf.r_hat, "Inferred activities file")->required();
  c_mf->add_option("--measurements", mf.measurements, "label<TAB>config<TAB>value file")
      ->required();
  c_mf->add_option("--report", mf.report, "JSON report")->capture_default_str();

  OverlapOpts ov;
  auto* c_ov = app.add_subcommand("overlap", "Hypergeometric overlap with prior target sets");
  c_ov->add_option("--network", ov.network, "Inferred network")->required();
  c_ov->add_option("--prior-sets", ov.prior_sets, "set_name<TAB>member_id file")->required();
  c_ov->add_option("--population", ov.population, "Population size (0: network n)")
      ->capture_default_str();
  c_ov->add_option("--out", ov.out, "Overlap TSV")->capture_default_str();
  c_ov->add_option("--report", ov.report, "Optional JSON report with the best assignment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_sim) run_simulate(sim);
    if (*c_inf) run_infer(inf);
    if (*c_ev) run_evaluate(ev);
    if (*c_bm) run_benchmark(bm);
    if (*c_mf) run_match_factors(mf);
    if (*c_ov) run_overlap(ov);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
