#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "polyscale/gaussian.hpp"
#include "polyscale/scan.hpp"

using namespace polyscale;

namespace {

ScanConfig small_config() {
  ScanConfig c;
  c.beta_grid = {0.0};
  c.n_grid = {64, 256, 1024};
  c.t_grid = {0.5, 1.0};
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  c.t_grid.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.n_grid = {256, 64};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.alpha = 2.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.t_grid = {0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.p = 3.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.beta_grid.clear();
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = small_config();
  c.sign = SignConvention::AsWritten;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.algorithm = Algorithm::MetropolisSingleFlip;
  CHECK_NOTHROW(c.validate());
  c = small_config();
  c.jackknife_groups = 500;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("classification of synthetic SRW data") {
  std::mt19937_64 g(1);
  RowStatistics row;
  std::vector<double> e2, e2_se;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const std::size_t M = 2000;
    std::vector<double> coords;
    double s2 = 0, s4 = 0, speed = 0;
    for (std::size_t k = 0; k < M; ++k) {
      long x = 0, y = 0;
      for (std::size_t i = 0; i < n; ++i) switch (g() % 4) {
          case 0: ++x; break;
          case 1: --x; break;
          case 2: ++y; break;
          default: --y;
        }
      // rotated coordinates, each a +-1 walk
      coords.push_back(double(x - y) / std::sqrt(double(n)));
      coords.push_back(double(x + y) / std::sqrt(double(n)));
      const double r2 = double(x * x + y * y);
      s2 += r2;
      s4 += r2 * r2;
      speed += double(std::abs(x) + std::abs(y)) / double(n);
    }
    const double m = s2 / M;
    e2.push_back(m);
    e2_se.push_back(std::sqrt((s4 / M - m * m) / (M - 1)));
    const auto d = d_p_to_gaussian(EmpiricalMeasure(1, coords), 1.0, 2.0, ReferenceMode::OneD, 0, 0);
    row.n.push_back(n);
    row.d.push_back(std::sqrt(2.0) * d.value);
    row.speed.push_back(speed / M);
    row.speed_se.push_back(0.01);
  }
  const auto fit = fit_gamma(row.n, e2, e2_se);
  row.gamma_hat = fit.slope;
  CHECK(row.gamma_hat == doctest::Approx(0.5).epsilon(0.1));
  CHECK(classify(row) == Verdict::Diffusive);
}

TEST_CASE("fully aligned polymers are ballistic") {
  RowStatistics row;
  std::vector<double> e2, e2_se;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    // W_n(1) = (sqrt n, 0), distance to N(0, I_2) from the 1D identity
    // d^2 = (x^2 + 1) + 1 for a point mass at x on the first axis.
    const double x = std::sqrt(double(n));
    const double d1 = d_p_to_gaussian(EmpiricalMeasure(1, {x}), 1.0, 2.0, ReferenceMode::OneD, 0, 0).value;
    row.n.push_back(n);
    row.d.push_back(std::sqrt(d1 * d1 + 1.0));
    row.speed.push_back(1.0);
    row.speed_se.push_back(0.0);
    e2.push_back(double(n) * double(n));
    e2_se.push_back(1.0);
  }
  row.gamma_hat = fit_gamma(row.n, e2, e2_se).slope;
  CHECK(row.gamma_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(classify(row) == Verdict::Ballistic);
  row.speed_se = {0.2, 0.2, 0.2};
  CHECK(classify(row) == Verdict::Undecided);
}

TEST_CASE("white-noise trend is undecided") {
  RowStatistics row{{256, 1024, 4096, 16384}, {0.1, 0.3, 0.05, 0.2}, 0.75, {0.5, 0.5, 0.5, 0.5}, {0, 0, 0, 0}};
  CHECK(classify(row) == Verdict::Undecided);
  row.n.pop_back();
  row.d = {0.3, 0.2};
  CHECK_THROWS_AS(classify(row), ValidationError);
}

TEST_CASE("bracket examples") {
  using V = Verdict;
  const std::vector<double> b{0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<V> v{V::Diffusive, V::Diffusive, V::Undecided, V::Ballistic, V::Ballistic};
  CHECK(bracket_crossover(b, v) == std::pair{0.4, 0.8});
  const std::vector<V> all(5, V::Diffusive);
  CHECK_THROWS_AS(bracket_crossover(b, all), NoBracketError);
  const std::vector<double> b2{0.1, 0.9};
  const std::vector<V> v2{V::Diffusive, V::Ballistic};
  CHECK(bracket_crossover(b2, v2) == std::pair{0.1, 0.9});
  const std::vector<V> rev{V::Ballistic, V::Diffusive};
  CHECK_THROWS_AS(bracket_crossover(b2, rev), NoBracketError);
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::Diffusive) == "diffusive");
  CHECK(parse_verdict("B") == Verdict::Ballistic);
  CHECK(parse_verdict("undecided") == Verdict::Undecided);
}

TEST_CASE("beta = 0 scan row") {
  const auto c = small_config();
  const auto r = run_scan(c);
  REQUIRE(r.rows.size() == 1);
  const auto& row = r.rows[0];
  CHECK(row.gamma_hat == doctest::Approx(0.5).epsilon(0.1));
  CHECK(row.verdict == Verdict::Diffusive);
  for (const auto& cell : row.cells) {
    CHECK(cell.hyp.third_moment_max == 1.0);
    CHECK(cell.m == cell.n / cell.ell);
    CHECK(cell.d_p.size() == 2);
    CHECK(cell.w_second_moment == doctest::Approx(2.0).epsilon(0.1));
    CHECK(cell.l1_sq_ratio <= 1.0);
  }
  CHECK_FALSE(r.bracket.has_value());
}

TEST_CASE("run_cell is deterministic and seed sensitive") {
  auto c = small_config();
  c.replicas = 20;
  c.jackknife_groups = 5;
  const auto a = run_cell(c, 0.3, 128);
  const auto b = run_cell(c, 0.3, 128);
  CHECK(a.d_p == b.d_p);
  CHECK(a.hyp.chi_hat == b.hyp.chi_hat);
  CHECK(a.end_to_end_sq == b.end_to_end_sq);
  c.seed = 2;
  CHECK(run_cell(c, 0.3, 128).d_p != a.d_p);
}

TEST_CASE("paths are returned on request") {
  auto c = small_config();
  c.replicas = 10;
  c.jackknife_groups = 5;
  std::vector<PathProcess> paths;
  const auto cell = run_cell(c, 0.0, 64, &paths, 3);
  REQUIRE(paths.size() == 3);
  for (const auto& p : paths) {
    CHECK(p.n == 64);
    CHECK(p.nodes.size() == 2 * 65);
    CHECK(p.nodes[0] == 0.0);
    CHECK(p.sigma == doctest::Approx(std::sqrt(cell.hyp.chi_hat / 2)));
  }
}

TEST_CASE("2D distance route for p != 2") {
  auto c = small_config();
  c.p = 1.0;
  c.replicas = 40;
  c.jackknife_groups = 10;
  c.ref_samples = 200;
  const auto cell = run_cell(c, 0.0, 256);
  for (std::size_t i = 0; i < cell.t.size(); ++i) {
    CHECK(cell.d_p[i] > 0.0);
    CHECK(cell.d_p_se[i] > 0.0);
  }
}

TEST_CASE("chi tail heuristic") {
  const auto k = InteractionKernel::power_law(2.0);
  CHECK(chi_tail_heuristic(k, 10, 0.0, 1.0) == 0.0);
  CHECK(chi_tail_heuristic(k, 10, 0.5, 2.0) == doctest::Approx(2 * 0.5 * 4.0 / 10.5));
}
