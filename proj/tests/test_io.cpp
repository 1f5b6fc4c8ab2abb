#include "sparsenet/error.hpp"
#include "sparsenet/io.hpp"
#include "sparsenet/netsim.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace sparsenet;

TEST_CASE("doubles round-trip through text") {
  for (double x : {0.0, 1.0, -0.1, 1.0 / 3.0, 6.02214076e23, 5e-324,
                   std::numeric_limits<double>::max()}) {
    CHECK(io::parse_double(io::format_double(x)) == x);
  }
  CHECK_THROWS_AS(io::parse_double("1.5x"), IoError);
  CHECK_THROWS_AS(io::parse_double(""), IoError);
}

TEST_CASE("networks round-trip") {
  for (const auto& net : {netsim::gen_poisson_network(50, 4, 10, 7),
                          netsim::gen_powerlaw_network(80, 5, 12, 2.3, 9)}) {
    const std::string text = io::format_network(io::to_network_file(net));
    const auto parsed = io::parse_network(text);
    CHECK(io::to_network_model(parsed) == net);
    CHECK(io::format_network(parsed) == text);
    CHECK(parsed.adjacency() == net.adjacency());
  }
  const auto net = netsim::gen_poisson_network(50, 4, 10, 7);
  const std::string text = io::format_network(io::to_network_file(net));
  CHECK(text.rfind("# network n=50 p=4 topology=poisson seed=7", 0) == 0);
}

TEST_CASE("network parsing errors") {
  CHECK_THROWS_AS(io::parse_network(""), IoError);
  CHECK_THROWS_AS(io::parse_network("# data m=1\n"), IoError);
  CHECK_THROWS_AS(io::parse_network("# network n=3 p=1 topology=poisson seed=1\n1\t4\t0.5\n"),
                  IoError);
  CHECK_THROWS_AS(io::parse_network("# network n=3 p=1 topology=poisson seed=1\n1\t2\n"), IoError);
  const auto inferred = io::parse_network("# network n=3 p=1 topology=inferred seed=1\n1\t2\t0.5\n");
  CHECK(inferred.edges.size() == 1);
  CHECK(inferred.edges[0].target == 1);
  CHECK_THROWS_AS(io::to_network_model(inferred), IoError);
}

TEST_CASE("data and regulator matrices round-trip") {
  const auto net = netsim::gen_poisson_network(30, 3, 6, 2);
  const auto data = netsim::simulate_data(net, 12, 0.1, 2);
  const auto g = io::parse_matrix(io::format_data(data.g, 0.1, 2));
  CHECK(g.kind == "data");
  CHECK(g.values == data.g);
  CHECK(g.noise == 0.1);
  CHECK(g.seed == 2);
  const auto r = io::parse_matrix(io::format_regulators(data.r_gold, 2));
  CHECK(r.kind == "regulators");
  CHECK(r.values == data.r_gold);
  CHECK_THROWS_AS(io::parse_matrix("# data m=2 n=2 noise=0 seed=1\n1\t2\n"), IoError);
  CHECK_THROWS_AS(io::parse_matrix("# data m=1 n=2 noise=0 seed=1\n1\t2\t3\n"), IoError);
}

TEST_CASE("prior sets and measurements") {
  const auto sets = io::parse_prior_sets("a\t1\nb\t3\na\t2\n");
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].name == "a");
  CHECK(sets[0].members == std::vector<Index>{0, 1});
  CHECK(sets[1].members == std::vector<Index>{2});
  CHECK_THROWS_AS(io::parse_prior_sets("a\t0\n"), IoError);

  const auto meas = io::parse_measurements("x\t1\t0.5\ny\t2\t1\nx\t3\t-2\n");
  REQUIRE(meas.size() == 2);
  CHECK(meas[0].label == "x");
  CHECK(meas[0].config_indices == std::vector<Index>{0, 2});
  CHECK(meas[0].values == std::vector<double>{0.5, -2.0});
}

TEST_CASE("csv writers") {
  evaluation::SweepRow row{evaluation::Axis::Noise, 0.1, 3, 0.5, 0.25, 4, 0.0, ""};
  CHECK(io::format_sweep({row}) ==
        "axis,value,seed,rho_bar,f1,p_inferred,seconds\nnoise,0.1,3,0.5,0.25,4,0\n");
  evaluation::SweepAggregate agg{evaluation::Axis::P, 5, 0.75, 0.125, 2};
  CHECK(io::format_aggregate({agg}) == "axis,value,mean_rho,std_rho,n_seeds\nP,5,0.75,0.125,2\n");
}

TEST_CASE("atomic writes replace the target and leave no temp file") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sparsenet_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  io::write_file_atomic(path, "first\n");
  io::write_file_atomic(path, "second\n");
  CHECK(io::read_file(path) == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  CHECK_THROWS_AS(io::read_file((dir / "missing").string()), IoError);
  CHECK_THROWS_AS(io::write_file_atomic((dir / "no/such/dir/x").string(), "x"), IoError);
  fs::remove_all(dir);
}
