#include "oracles.hpp"

#include "sparsenet/decomposition.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/evaluation.hpp"
#include "sparsenet/netsim.hpp"

#include <doctest.h>

#include <algorithm>

using namespace sparsenet;

TEST_CASE("default p_star overshoots the guess") {
  CHECK(default_p_star(10) == 15);
  CHECK(default_p_star(4) == 7);
  CHECK(default_p_star(1) == 4);
  CHECK_THROWS_AS(default_p_star(0), ParameterError);
}

TEST_CASE("rank-1 data gives one regulator and zero residual") {
  Vector r(4), c(6);
  r << 1, 2, 0.5, -1;
  c << 0, 3, 0, 0, -1, 2;
  const Matrix g = r * c.transpose();
  const Factorization f = infer_network(g, 1, PursuitConfig{});
  REQUIRE(f.regulators() == 1);
  CHECK(f.residual_fro < 1e-10);
  CHECK(evaluation::score_rows(f.c_hat, c.transpose()).rho_bar == doctest::Approx(1.0));
  CHECK(f.support[0] == std::vector<Index>{1, 4, 5});
}

TEST_CASE("noiseless planted network is recovered exactly") {
  const auto net = netsim::gen_poisson_network(40, 4, 8, 3);
  const auto data = netsim::simulate_data(net, 80, 0.0, 3);
  const Factorization f = infer_network(data.g, 4, PursuitConfig{});
  REQUIRE(f.regulators() == 4);
  CHECK(f.residual_fro < 1e-8 * data.g.norm());
  CHECK(f.nonzeros() == static_cast<Index>(net.edges.size()));

  const auto match = evaluation::score_rows(f.c_hat, net.adjacency());
  CHECK(match.rho_bar > 1.0 - 1e-10);
  const auto gold_support = net.supports();
  for (const auto& [inf, gold] : match.pairs) {
    CHECK(f.support[static_cast<std::size_t>(inf)] == gold_support[static_cast<std::size_t>(gold)]);
  }
  // The inferred activities absorb the row scaling of the inferred network.
  CHECK((f.r_hat * f.c_hat - data.g).norm() < 1e-8 * data.g.norm());
}

TEST_CASE("assembly inverts the basis") {
  const auto net = netsim::gen_poisson_network(20, 3, 5, 9);
  const auto data = netsim::simulate_data(net, 30, 0.0, 9);
  const auto svd = linalg::truncated_svd(data.g, 3);
  Matrix b(3, 3);
  b << 1, 0.2, 0, 0, 1, 0.3, 0.1, 0, 1;
  const Factorization f = assemble_factors(data.g, svd, b);
  CHECK((f.r_hat * f.c_hat - svd.reconstruct()).norm() < 1e-10);
  CHECK_THROWS_AS(assemble_factors(data.g, svd, Matrix::Ones(3, 2)), SingularMatrixError);
  CHECK_THROWS_AS(assemble_factors(data.g, svd, Matrix::Ones(2, 2)), DimensionError);
}

TEST_CASE("pruning drops vanishing regulators only") {
  const auto net = netsim::gen_poisson_network(20, 3, 5, 2);
  const auto data = netsim::simulate_data(net, 30, 0.0, 2);
  const auto svd = linalg::truncated_svd(data.g, 3);
  Factorization f = assemble_factors(data.g, svd, Matrix::Identity(3, 3));
  prune_regulators(f);
  CHECK(f.pruned == 0);
  CHECK(f.regulators() == 3);

  // A singular direction with zero weight makes its regulator prunable.
  linalg::TruncatedSvd padded = svd;
  padded.s[2] = 0.0;
  Factorization g = assemble_factors(data.g, padded, Matrix::Identity(3, 3));
  prune_regulators(g);
  CHECK(g.pruned == 1);
  CHECK(g.regulators() == 2);
  CHECK(g.basis.cols() == 2);
}

TEST_CASE("thresholding zeroes relative dust") {
  const auto net = netsim::gen_poisson_network(20, 2, 5, 5);
  const auto data = netsim::simulate_data(net, 30, 0.0, 5);
  const auto svd = linalg::truncated_svd(data.g, 2);
  Factorization f = assemble_factors(data.g, svd, Matrix::Identity(2, 2));
  f.c_hat(0, 0) = 1e-12 * f.c_hat.row(0).cwiseAbs().maxCoeff();
  threshold_loadings(f, data.g, 1e-8);
  CHECK(f.c_hat(0, 0) == 0.0);
  CHECK(f.support.size() == 2);
  CHECK(std::find(f.support[0].begin(), f.support[0].end(), 0) == f.support[0].end());
}

TEST_CASE("objective value") {
  Matrix g(2, 2), r(2, 1), c(1, 2);
  g << 1, 0, 2, 0;
  r << 1, 2;
  c << 1, 0;
  CHECK(objective_value(g, r, c, {0.5}) == doctest::Approx(0.5));
  c << 1, 1e-12;
  CHECK(count_nonzeros(c, 1e-8) == 1);
  CHECK_THROWS_AS(objective_value(g, r, c, {-1.0}), ParameterError);
  CHECK_THROWS_AS(objective_value(g, c, c, {0.0}), DimensionError);
}

TEST_CASE("infer_network input checks") {
  const Matrix g = Matrix::Ones(5, 4);
  CHECK_THROWS_AS(infer_network(g, 4, PursuitConfig{}), DimensionError);
  CHECK_THROWS_AS(infer_network(Matrix::Ones(1, 4), 1, PursuitConfig{}), DimensionError);
}
