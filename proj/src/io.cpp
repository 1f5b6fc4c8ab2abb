#include "sparsenet/io.hpp"

#include "sparsenet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace sparsenet::io {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError("not a number: '" + text + "'");
  }
  return x;
}

namespace {

long long parse_int(const std::string& text) {
  long long x = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError("not an integer: '" + text + "'");
  }
  return x;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t x = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) throw IoError("not a seed: '" + text + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// "# <kind> key=value ..." into a map; checks the kind.
std::map<std::string, std::string> parse_header(const std::string& line,
                                                const std::string& kind) {
  std::istringstream in(line);
  std::string hash, word;
  in >> hash >> word;
  if (hash != "#" || word != kind) throw IoError("expected a '# " + kind + "' header");
  std::map<std::string, std::string> fields;
  while (in >> word) {
    const std::size_t eq = word.find('=');
    if (eq == std::string::npos) throw IoError("malformed header field '" + word + "'");
    fields[word.substr(0, eq)] = word.substr(eq + 1);
  }
  return fields;
}

const std::string& field(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw IoError("header lacks '" + key + "'");
  return it->second;
}

Index parse_id(const std::string& text, Index limit, const std::string& what) {
  const long long id = parse_int(text);
  if (id < 1 || id > limit) {
    throw IoError(what + " id " + text + " outside 1.." + std::to_string(limit));
  }
  return static_cast<Index>(id - 1);
}

void append_row(std::string& out, const Matrix& m, Index i) {
  for (Index j = 0; j < m.cols(); ++j) {
    if (j) out += '\t';
    out += format_double(m(i, j));
  }
  out += '\n';
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into '" + path + "'");
  }
}

Matrix NetworkFile::adjacency() const {
  Matrix c = Matrix::Zero(p, n);
  for (const netsim::Edge& e : edges) c(e.regulator, e.target) = e.weight;
  return c;
}

std::vector<std::vector<Index>> NetworkFile::supports() const {
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(p));
  for (const netsim::Edge& e : edges) out[static_cast<std::size_t>(e.regulator)].push_back(e.target);
  for (auto& s : out) std::sort(s.begin(), s.end());
  return out;
}

NetworkFile to_network_file(const netsim::NetworkModel& net) {
  return {net.n_observed, net.n_hidden, net.topology_tag(), net.seed, net.mean_out_degree,
          net.edges};
}

netsim::NetworkModel to_network_model(const NetworkFile& file) {
  netsim::NetworkModel net;
  net.n_observed = file.n;
  net.n_hidden = file.p;
  net.seed = file.seed;
  net.mean_out_degree = file.degree;
  net.edges = file.edges;
  std::sort(net.edges.begin(), net.edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.regulator, a.target) < std::pair(b.regulator, b.target);
  });
  const std::string prefix = "powerlaw(";
  if (file.topology == "poisson") {
    net.topology = netsim::Topology::Poisson;
  } else if (file.topology.rfind(prefix, 0) == 0 && file.topology.back() == ')') {
    net.topology = netsim::Topology::PowerLaw;
    net.gamma = parse_double(
        file.topology.substr(prefix.size(), file.topology.size() - prefix.size() - 1));
  } else {
    throw IoError("topology '" + file.topology + "' is not a simulated one");
  }
  return net;
}

NetworkFile network_from_matrix(const Matrix& c, const std::string& topology,
                                std::uint64_t seed) {
  NetworkFile f;
  f.n = c.cols();
  f.p = c.rows();
  f.topology = topology;
  f.seed = seed;
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      if (c(i, j) != 0.0) f.edges.push_back({i, j, c(i, j)});
    }
  }
  f.degree = f.p ? static_cast<double>(f.edges.size()) / static_cast<double>(f.p) : 0.0;
  return f;
}

std::string format_network(const NetworkFile& net) {
  std::string out = "# network n=" + std::to_string(net.n) + " p=" + std::to_string(net.p) +
                    " topology=" + net.topology + " seed=" + std::to_string(net.seed) +
                    " degree=" + format_double(net.degree) + "\n";
  out += "regulator\ttarget\tweight\n";
  for (const netsim::Edge& e : net.edges) {
    out += std::to_string(e.regulator + 1) + '\t' + std::to_string(e.target + 1) + '\t' +
           format_double(e.weight) + '\n';
  }
  return out;
}

NetworkFile parse_network(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw IoError("empty network file");
  const auto fields = parse_header(lines[0], "network");
  NetworkFile f;
  f.n = static_cast<Index>(parse_int(field(fields, "n")));
  f.p = static_cast<Index>(parse_int(field(fields, "p")));
  f.topology = field(fields, "topology");
  f.seed = parse_seed(field(fields, "seed"));
  if (fields.count("degree")) f.degree = parse_double(fields.at("degree"));
  if (f.n < 1 || f.p < 1) throw IoError("network header needs n, p >= 1");

  std::size_t start = 1;
  if (lines.size() > 1 && lines[1].rfind("regulator", 0) == 0) start = 2;
  for (std::size_t k = start; k < lines.size(); ++k) {
    const auto cells = split(lines[k], '\t');
    if (cells.size() != 3) throw IoError("network line " + std::to_string(k + 1) + ": need 3 fields");
    f.edges.push_back({parse_id(cells[0], f.p, "regulator"), parse_id(cells[1], f.n, "target"),
                       parse_double(cells[2])});
  }
  return f;
}

std::string format_data(const Matrix& g, double noise, std::uint64_t seed) {
  std::string out = "# data m=" + std::to_string(g.rows()) + " n=" + std::to_string(g.cols()) +
                    " noise=" + format_double(noise) + " seed=" + std::to_string(seed) + "\n";
  for (Index i = 0; i < g.rows(); ++i) append_row(out, g, i);
  return out;
}

std::string format_regulators(const Matrix& r, std::uint64_t seed) {
  std::string out = "# regulators m=" + std::to_string(r.rows()) +
                    " p=" + std::to_string(r.cols()) + " seed=" + std::to_string(seed) + "\n";
  for (Index i = 0; i < r.rows(); ++i) append_row(out, r, i);
  return out;
}

MatrixFile parse_matrix(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty()) throw IoError("empty matrix file");
  MatrixFile f;
  std::map<std::string, std::string> fields;
  std::string cols_key;
  if (lines[0].rfind("# data", 0) == 0) {
    f.kind = "data";
    fields = parse_header(lines[0], "data");
    cols_key = "n";
    f.noise = parse_double(field(fields, "noise"));
  } else {
    f.kind = "regulators";
    fields = parse_header(lines[0], "regulators");
    cols_key = "p";
  }
  f.seed = parse_seed(field(fields, "seed"));
  const long long m = parse_int(field(fields, "m"));
  const long long cols = parse_int(field(fields, cols_key));
  if (m < 1 || cols < 1) throw IoError("matrix header needs positive dimensions");
  if (static_cast<long long>(lines.size()) - 1 != m) {
    throw IoError("matrix file has " + std::to_string(lines.size() - 1) + " rows, header says " +
                  std::to_string(m));
  }
  f.values.resize(m, cols);
  for (Index i = 0; i < m; ++i) {
    const auto cells = split(lines[static_cast<std::size_t>(i) + 1], '\t');
    if (static_cast<long long>(cells.size()) != cols) {
      throw IoError("matrix row " + std::to_string(i + 1) + " has the wrong length");
    }
    for (Index j = 0; j < cols; ++j) f.values(i, j) = parse_double(cells[static_cast<std::size_t>(j)]);
  }
  return f;
}

std::vector<interpret::NamedSet> parse_prior_sets(const std::string& text) {
  std::vector<interpret::NamedSet> sets;
  std::map<std::string, std::size_t> where;
  for (const std::string& line : lines_of(text)) {
    if (line[0] == '#') continue;
    const auto cells = split(line, '\t');
    if (cells.size() != 2) throw IoError("prior set line needs set_name<TAB>member_id");
    const long long id = parse_int(cells[1]);
    if (id < 1) throw IoError("member ids are 1-based");
    auto [it, fresh] = where.try_emplace(cells[0], sets.size());
    if (fresh) sets.push_back({cells[0], {}});
    sets[it->second].members.push_back(static_cast<Index>(id - 1));
  }
  return sets;
}

std::string format_overlap_report(const interpret::OverlapReport& report) {
  std::string out = "regulator\tset_name\toverlap\tlog_pval\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.regulator + 1) + '\t' + row.set_name + '\t' +
           std::to_string(row.test.overlap) + '\t' + format_double(row.test.log_pval) + '\n';
  }
  return out;
}

std::vector<interpret::FactorMeasurement> parse_measurements(const std::string& text) {
  std::vector<interpret::FactorMeasurement> out;
  std::map<std::string, std::size_t> where;
  for (const std::string& line : lines_of(text)) {
    if (line[0] == '#') continue;
    const auto cells = split(line, '\t');
    if (cells.size() != 3) throw IoError("measurement line needs label<TAB>config_index<TAB>value");
    const long long idx = parse_int(cells[1]);
    if (idx < 1) throw IoError("configuration indices are 1-based");
    auto [it, fresh] = where.try_emplace(cells[0], out.size());
    if (fresh) out.push_back({{}, {}, cells[0]});
    auto& meas = out[it->second];
    meas.config_indices.push_back(static_cast<Index>(idx - 1));
    meas.values.push_back(parse_double(cells[2]));
  }
  return out;
}

std::string format_sweep(const std::vector<evaluation::SweepRow>& rows) {
  std::string out = "axis,value,seed,rho_bar,f1,p_inferred,seconds\n";
  for (const auto& r : rows) {
    const bool ok = r.error.empty();
    out += evaluation::axis_name(r.axis) + ',' + format_double(r.value) + ',' +
           std::to_string(r.seed) + ',' + (ok ? format_double(r.rho_bar) : "nan") + ',' +
           (ok ? format_double(r.f1) : "nan") + ',' + std::to_string(r.p_inferred) + ',' +
           format_double(r.seconds) + '\n';
  }
  return out;
}

std::string format_aggregate(const std::vector<evaluation::SweepAggregate>& rows) {
  std::string out = "axis,value,mean_rho,std_rho,n_seeds\n";
  for (const auto& r : rows) {
    out += evaluation::axis_name(r.axis) + ',' + format_double(r.value) + ',' +
           format_double(r.mean_rho) + ',' + format_double(r.std_rho) + ',' +
           std::to_string(r.n_seeds) + '\n';
  }
  return out;
}

}  // namespace sparsenet::io
