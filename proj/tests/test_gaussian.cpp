#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "polyscale/gaussian.hpp"

using namespace polyscale;

namespace {

// Phi^{-1} by bisection on erfc.
double probit(double u) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Midpoint rule for int_0^1 |F^{-1}(u) - sqrt(t) Phi^{-1}(u)|^p du on sorted equal-weight atoms.
double midpoint_cost(const std::vector<double>& sorted, double t, double p, int grid) {
  double c = 0;
  const double k = double(sorted.size());
  for (int i = 0; i < grid; ++i) {
    const double u = (i + 0.5) / grid;
    const auto idx = std::min(sorted.size() - 1, std::size_t(u * k));
    c += std::pow(std::abs(sorted[idx] - std::sqrt(t) * probit(u)), p) / grid;
  }
  return c;
}

std::vector<double> normal_draws(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = z(g);
  return x;
}

}  // namespace

TEST_CASE("point mass at the origin") {
  const EmpiricalMeasure delta(1, {0.0});
  CHECK(gaussian_cost_1d(delta, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_cost_1d(delta, 2.5, 2.0) == doctest::Approx(2.5).epsilon(1e-12));
  // E|Z| = sqrt(2 / pi)
  CHECK(gaussian_cost_1d(delta, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  const auto d = d_p_to_gaussian(delta, 1.0, 2.0, ReferenceMode::OneD, 0, 0);
  CHECK(d.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed forms and quadrature agree with a midpoint oracle") {
  for (std::size_t k : {1u, 3u, 10u}) {
    auto x = normal_draws(k, k, 1.3);
    std::sort(x.begin(), x.end());
    for (double p : {0.5, 1.0, 1.5, 2.0})
      for (double t : {0.25, 1.0}) {
        CAPTURE(k);
        CAPTURE(p);
        CAPTURE(t);
        CHECK(gaussian_cost_sorted(x, t, p) == doctest::Approx(midpoint_cost(x, t, p, 400000)).epsilon(2e-4));
      }
  }
}

TEST_CASE("sorted fast path equals the weighted route") {
  auto x = normal_draws(3, 200);
  const EmpiricalMeasure mu(1, x);
  std::sort(x.begin(), x.end());
  for (double p : {1.0, 2.0, 0.7}) CHECK(gaussian_cost_1d(mu, 0.6, p) == doctest::Approx(gaussian_cost_sorted(x, 0.6, p)).epsilon(1e-10));
}

TEST_CASE("1e5 standard normal draws are close to N(0, 1)") {
  const EmpiricalMeasure mu(1, normal_draws(2024, 100000));
  const auto d = d_p_to_gaussian(mu, 1.0, 2.0, ReferenceMode::OneD, 0, 0);
  CHECK(d.value < 0.02);
}

TEST_CASE("2D reference sample against itself") {
  const auto ref = gaussian_reference_sample(1.0, 300, 77);
  const auto d = d_p_to_gaussian(ref, 1.0, 2.0, ReferenceMode::TwoD, 300, 77);
  CHECK(d.value <= 1e-12);
  const auto again = gaussian_reference_sample(1.0, 300, 77);
  CHECK(again.coords == ref.coords);
}

TEST_CASE("2D mode gives a jackknife error") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> z;
  std::vector<double> c(2 * 400);
  for (auto& v : c) v = 1.5 * z(g);
  const EmpiricalMeasure mu(2, c);
  const auto d = d_p_to_gaussian(mu, 1.0, 2.0, ReferenceMode::TwoD, 400, 3, 10);
  // E||X - Y||^2 optimum for N(0, 2.25 I) vs N(0, I) is 2 (1.5 - 1)^2 = 0.5
  CHECK(d.value == doctest::Approx(std::sqrt(0.5)).epsilon(0.3));
  CHECK(d.se > 0.0);
  CHECK_THROWS_AS(d_p_to_gaussian(mu, 0.0, 2.0, ReferenceMode::TwoD, 400, 3), ValidationError);
}

TEST_CASE("thinning keeps every k-th atom") {
  const EmpiricalMeasure mu(1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto t = thin_atoms(mu, 5);
  CHECK(t.coords == std::vector<double>{0, 2, 4, 6, 8});
  CHECK(t.weights == std::vector<double>(5, 0.2));
}

TEST_CASE("Gaussian absolute moments") {
  CHECK(gaussian_abs_moment(1, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(gaussian_abs_moment(2, 1.0, 2.0) == doctest::Approx(2.0));
  CHECK(gaussian_abs_moment(1, 4.0, 1.0) == doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)));
  // E||Z|| for Z ~ N(0, I_2) is sqrt(pi / 2)
  CHECK(gaussian_abs_moment(2, 1.0, 1.0) == doctest::Approx(std::sqrt(M_PI / 2)));
}

TEST_CASE("Bickel-Freedman: refining normal quantile grids converge") {
  std::vector<EmpiricalMeasure> seq;
  for (std::size_t k : {10u, 100u, 1000u, 10000u}) {
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = probit((i + 0.5) / double(k));
    seq.emplace_back(1, std::move(x));
  }
  const auto r = bickel_freedman_check(seq, GaussianTarget{1, 1.0}, 2.0);
  CHECK(r.d_shrinks);
  CHECK(r.moment_shrinks);
  CHECK(r.cdf_shrinks);
  CHECK(r.convergent);
  CHECK_FALSE(r.inconsistent);
}

TEST_CASE("Bickel-Freedman: constant point mass does not converge") {
  std::vector<EmpiricalMeasure> seq(4, EmpiricalMeasure(1, {0.0}));
  const auto r = bickel_freedman_check(seq, GaussianTarget{1, 1.0}, 2.0);
  for (double d : r.d) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  for (double m : r.moment) CHECK(m == 0.0);
  CHECK(r.reference_moment == doctest::Approx(1.0));
  CHECK_FALSE(r.d_shrinks);
  CHECK_FALSE(r.convergent);
}

TEST_CASE("Bickel-Freedman: reference against itself") {
  const auto ref = gaussian_reference_sample(1.0, 200, 9);
  std::vector<EmpiricalMeasure> seq(3, ref);
  const auto r = bickel_freedman_check(seq, ref, 2.0);
  for (double v : r.d) CHECK(v <= 1e-12);
  for (double v : r.moment_gap) CHECK(v <= 1e-12);
  for (double v : r.cdf_gap) CHECK(v <= 1e-12);
  CHECK(r.convergent);
  CHECK_THROWS_AS(bickel_freedman_check(std::span(seq).first(2), ref, 2.0), ValidationError);
}

TEST_CASE("heavy tails shrink in d_2 but not in the moment") {
  // Mixtures (1 - 1/k) N(0, 1) + (1/k) delta_{sqrt(k)}: the CDF gap vanishes
  // while the second moment stays about one unit above the target.
  std::vector<EmpiricalMeasure> seq;
  for (std::size_t k : {4u, 16u, 64u, 256u}) {
    auto x = normal_draws(k, 102400);
    for (std::size_t i = 0; i < x.size(); i += k) x[i] = std::sqrt(double(k));
    seq.emplace_back(1, x);
  }
  const auto r = bickel_freedman_check(seq, GaussianTarget{1, 1.0}, 2.0);
  CHECK(r.cdf_shrinks);
  CHECK_FALSE(r.moment_shrinks);
  CHECK_FALSE(r.d_shrinks);
  CHECK_FALSE(r.convergent);
  const auto r1 = bickel_freedman_check(seq, GaussianTarget{1, 1.0}, 1.0);
  CHECK(r1.d_shrinks);
  CHECK(r1.moment_shrinks);
}

TEST_CASE("reference mode parsing") {
  CHECK(parse_reference_mode("1d") == ReferenceMode::OneD);
  CHECK(parse_reference_mode("2d") == ReferenceMode::TwoD);
  CHECK_THROWS_AS(parse_reference_mode("3d"), ValidationError);
}
