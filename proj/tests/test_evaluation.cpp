#include "oracles.hpp"

#include "sparsenet/error.hpp"
#include "sparsenet/evaluation.hpp"

#include <doctest.h>

#include <random>

using namespace sparsenet;
using namespace sparsenet::evaluation;

namespace {

Matrix random_matrix(Index r, Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

}  // namespace

TEST_CASE("row normalization") {
  const Matrix c = random_matrix(3, 20, 1);
  const Matrix z = row_normalize(c);
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(z.row(i).mean()) < 1e-12);
    CHECK(z.row(i).squaredNorm() / 20.0 == doctest::Approx(1.0));
  }
  Matrix bad = c;
  bad.row(1).setConstant(2.0);
  try {
    row_normalize(bad);
    FAIL("expected DegenerateError");
  } catch (const DegenerateError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("identical networks score one") {
  const Matrix c = random_matrix(4, 30, 2);
  const auto match = score_rows(c, c);
  CHECK(match.rho_bar == doctest::Approx(1.0));
  CHECK(match.pairs.size() == 4);
  for (double s : match.scale) CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("scores are invariant to row permutation and rescaling") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix gold = random_matrix(5, 40, static_cast<unsigned>(100 + trial));
    const Matrix inf = gold + 0.5 * random_matrix(5, 40, static_cast<unsigned>(200 + trial));
    const double base = score_rows(inf, gold).rho_bar;
    std::vector<Index> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix moved(5, 40);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    for (Index i = 0; i < 5; ++i) {
      const double d = (rng() % 2 ? 1.0 : -1.0) * mag(rng);
      moved.row(i) = d * inf.row(perm[static_cast<std::size_t>(i)]);
    }
    CHECK(std::abs(score_rows(moved, gold).rho_bar - base) <= 1e-10);
  }
}

TEST_CASE("assignment equals the brute-force optimum") {
  for (unsigned seed = 1; seed <= 30; ++seed) {
    const Index rows = 1 + seed % 6;
    const Index cols = 1 + (seed * 7) % 7;
    const Matrix w = random_matrix(rows, cols, seed);
    const auto pairs = max_assignment(w);
    CHECK(static_cast<Index>(pairs.size()) == std::min(rows, cols));
    double total = 0.0;
    for (const auto& [i, j] : pairs) total += std::abs(w(i, j));
    CHECK(total == doctest::Approx(oracle::brute_force_assignment(w.cwiseAbs())).epsilon(1e-12));
  }
}

TEST_CASE("constant inferred rows count as zero correlation") {
  Matrix gold = random_matrix(2, 10, 3);
  Matrix inf = gold;
  inf.row(1).setZero();
  const auto match = score_rows(inf, gold);
  CHECK(match.rho_bar == doctest::Approx(0.5));
}

TEST_CASE("edge metrics") {
  MatchResult match;
  match.pairs = {{0, 0}};
  const std::vector<std::vector<Index>> gold{{0, 1, 2, 3}};
  auto m = edge_metrics(match, {{0, 1}}, gold);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 0.5);
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  m = edge_metrics(match, {{5, 6}}, gold);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
}

TEST_CASE("axis names round-trip") {
  for (Axis a : {Axis::P, Axis::M, Axis::N, Axis::Noise, Axis::Degree}) {
    CHECK(parse_axis(axis_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_axis("bogus"), ParameterError);
}

TEST_CASE("sweeps are deterministic and ordered") {
  SweepSpec spec;
  spec.axis = Axis::P;
  spec.grid = {3};
  spec.fixed.n = 60;
  spec.fixed.m = 60;
  spec.seeds = {1};
  auto rows = benchmark_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].error.empty());
  CHECK(rows[0].rho_bar > 0.0);
  CHECK(rows[0].rho_bar <= 1.0);
  CHECK(rows[0].seconds == 0.0);

  spec.grid = {2, 3};
  spec.seeds = {1, 2, 3};
  spec.jobs = 1;
  const auto serial = benchmark_sweep(spec);
  spec.jobs = 3;
  const auto pooled = benchmark_sweep(spec);
  REQUIRE(serial.size() == 6);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    CHECK(serial[k].value == pooled[k].value);
    CHECK(serial[k].seed == pooled[k].seed);
    CHECK(serial[k].rho_bar == pooled[k].rho_bar);
  }
  CHECK(serial[0].value == 2.0);
  CHECK(serial[3].value == 3.0);

  const auto agg = aggregate(serial);
  REQUIRE(agg.size() == 2);
  double mean = 0.0;
  for (int k = 0; k < 3; ++k) mean += serial[static_cast<std::size_t>(k)].rho_bar / 3.0;
  CHECK(agg[0].mean_rho == doctest::Approx(mean));
  CHECK(agg[0].n_seeds == 3);
}

TEST_CASE("sweep cells record failures instead of aborting") {
  SweepSpec spec;
  spec.axis = Axis::N;
  spec.grid = {5};  // fewer observed variables than regulators
  spec.fixed.p = 10;
  spec.seeds = {1};
  const auto rows = benchmark_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].error.empty());
}
