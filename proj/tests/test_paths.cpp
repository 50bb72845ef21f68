#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "polyscale/paths.hpp"

using namespace polyscale;

namespace {

SpinChain random_chain(std::mt19937_64& g, std::size_t n) {
  SpinChain s(n);
  for (auto& x : s) x = (g() & 1) ? 1 : -1;
  return s;
}

// Unbiased sample covariance of columns i and j.
double sample_cov(const std::vector<SpinChain>& xs, std::size_t i, std::size_t j) {
  double mi = 0, mj = 0;
  for (const auto& x : xs) {
    mi += x[i];
    mj += x[j];
  }
  const double m = double(xs.size());
  mi /= m;
  mj /= m;
  double c = 0;
  for (const auto& x : xs) c += (x[i] - mi) * (x[j] - mj);
  return c / (m - 1);
}

}  // namespace

TEST_CASE("partial sums examples") {
  const SpinChain a{1, -1, 1};
  CHECK(partial_sums(a) == std::vector<std::int64_t>{0, 1, 0, 1});
  const SpinChain b(5, 1);
  CHECK(partial_sums(b) == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5});
  const auto s = partial_sums(Polymer({Step::PlusE1, Step::PlusE2}));
  CHECK(s == std::vector<Site>{{0, 0}, {1, 0}, {1, 1}});
  CHECK_THROWS_AS(partial_sums(SpinChain{}), ValidationError);
}

TEST_CASE("block decomposition examples") {
  const auto b = BlockScheme::with_ell(10, 3);
  CHECK(b.m == 3);
  const SpinChain ones(10, 1);
  CHECK(make_blocks(ones, b) == std::vector<std::int64_t>{3, 3, 3});
  SpinChain last(10, 1);
  last[9] = -1;
  CHECK(make_blocks(last, b) == std::vector<std::int64_t>{3, 3, 3});
  const auto d = BlockScheme::with_delta(4096, 0.2);
  CHECK(d.ell == 5);
  CHECK(d.m == 819);
  CHECK(d.lyapunov_ratio() == doctest::Approx(125.0 / 819.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_blocks(SpinChain(9, 1), b), ValidationError);
  CHECK_THROWS_AS(BlockScheme::with_delta(4096, 0.25), ValidationError);
  CHECK_THROWS_AS(BlockScheme::with_ell(4, 5), ValidationError);
}

TEST_CASE("block schedule shrinks ell^3 / m") {
  // With the integer floor the ratio jumps up whenever ell increments, so
  // the check is an overall trend plus the envelope n^{4 delta - 1} n / (n - ell);
  // the unrounded schedule n^{4 delta - 1} decreases strictly.
  std::vector<double> r;
  for (int k = 10; k <= 20; ++k) {
    const std::size_t n = std::size_t{1} << k;
    const auto b = BlockScheme::with_delta(n, 0.2);
    r.push_back(b.lyapunov_ratio());
    const double envelope = std::pow(double(n), 4 * 0.2 - 1) * double(n) / double(n - b.ell);
    CHECK(b.lyapunov_ratio() <= envelope * (1 + 1e-12));
  }
  CHECK(spearman_trend(r) < -0.8);
  CHECK(r.back() < r.front());
  for (int k = 10; k < 20; ++k) CHECK(std::pow(2.0, (k + 1) * -0.2) < std::pow(2.0, k * -0.2));
}

TEST_CASE("susceptibility cutoff") {
  CHECK(susceptibility_cutoff(1) == 0);
  CHECK(susceptibility_cutoff(2) == 1);
  CHECK(susceptibility_cutoff(10) == 4);
  CHECK(susceptibility_cutoff(16) == 4);
  CHECK(susceptibility_cutoff(17) == 5);
  CHECK(susceptibility_cutoff(4096) == 64);
}

TEST_CASE("third moment of +-1 chains is exactly one") {
  std::mt19937_64 g(1);
  ChainMoments m(20, BlockScheme::with_ell(20, 4));
  for (int i = 0; i < 50; ++i) m.add(random_chain(g, 20));
  CHECK(m.stats().third_moment_max == 1.0);
}

TEST_CASE("sample statistics equal direct formulas") {
  std::mt19937_64 g(2);
  const std::size_t n = 30;
  std::vector<SpinChain> xs;
  for (int i = 0; i < 200; ++i) {
    auto c = random_chain(g, n);
    if (i % 3 == 0) c[1] = c[0];
    xs.push_back(c);
  }
  const auto scheme = BlockScheme::with_ell(n, 4);
  ChainMoments m(n, scheme);
  for (const auto& x : xs) m.add(x);
  const auto h = m.stats();
  const std::size_t K = susceptibility_cutoff(n);
  double first = 0, bulk = 0;
  for (std::size_t k = 0; k <= K; ++k) {
    first += (k ? 2.0 : 1.0) * sample_cov(xs, 0, k);
    double c = 0;
    for (std::size_t i = 0; i + k < n; ++i) c += sample_cov(xs, i, i + k);
    bulk += (k ? 2.0 : 1.0) * c / double(n - k);
  }
  CHECK(std::abs(h.chi_hat_first_site - first) <= 1e-12);
  CHECK(std::abs(h.chi_hat - bulk) <= 1e-12);
  double var_s = 0, block = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) var_s += sample_cov(xs, i, j);
  for (std::size_t b = 0; b < scheme.m; ++b)
    for (std::size_t i = b * 4; i < b * 4 + 4; ++i)
      for (std::size_t j = b * 4; j < b * 4 + 4; ++j) block += sample_cov(xs, i, j);
  CHECK(h.var_ratio == doctest::Approx(var_s / double(n)).epsilon(1e-12));
  CHECK(h.block_var_ratio == doctest::Approx(block / double(scheme.m * 4)).epsilon(1e-12));
}

TEST_CASE("merging accumulators is exact") {
  std::mt19937_64 g(3);
  const auto scheme = BlockScheme::with_ell(16, 2);
  ChainMoments all(16, scheme), a(16, scheme), b(16, scheme);
  for (int i = 0; i < 40; ++i) {
    const auto c = random_chain(g, 16);
    all.add(c);
    (i % 2 ? a : b).add(c);
  }
  ChainMoments merged = b;
  merged += a;
  CHECK(merged.stats().chi_hat == all.stats().chi_hat);
  CHECK(merged.stats().var_ratio == all.stats().var_ratio);
  merged -= a;
  CHECK(merged.stats().block_var_ratio == b.stats().block_var_ratio);
}

TEST_CASE("beta = 0 hypothesis statistics are near one") {
  SamplerConfig c;
  c.seed = 10;
  c.replicas = 200;
  c.n_samples = 10;
  c.burn_in_sweeps = 5;
  c.algorithm = Algorithm::ClusterLongRange;
  const GibbsParams gp{0.0, InteractionKernel::power_law(1.5), 256};
  const auto b = sample_chain(gp, c);
  const auto h = hypothesis_stats(b, BlockScheme::with_delta(256, 0.2), 20);
  CHECK(std::abs(h.var_ratio - 1) < 3 * h.var_ratio_se);
  CHECK(std::abs(h.block_var_ratio - 1) < 3 * h.block_var_ratio_se);
  CHECK(std::abs(h.chi_hat - 1) < 3 * h.chi_hat_se);
  CHECK(h.third_moment_max == 1.0);
  CHECK(h.samples == 4000);
}

TEST_CASE("var_ratio at N = 10 matches the exact variance") {
  const GibbsParams gp{1.0, InteractionKernel::power_law(2.0), 10};
  const auto e = enumerate_chain(gp, 0.5);
  double v = 0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) v += e.covariance(i, j);
  SamplerConfig c;
  c.seed = 13;
  c.replicas = 400;
  c.n_samples = 25;
  c.thinning_sweeps = 3;
  c.burn_in_sweeps = 50;
  const auto b = sample_chain(gp, c);
  const auto h = hypothesis_stats(b, BlockScheme::with_ell(10, 2), 20);
  CHECK(std::abs(h.var_ratio - v / 10) < 3 * h.var_ratio_se);
  const double chi = susceptibility_from_covariance(e, h.k_cut, ChiMode::Bulk);
  CHECK(std::abs(h.chi_hat - chi) < 3 * h.chi_hat_se);
}

TEST_CASE("susceptibility from exact covariances") {
  const GibbsParams gp{0.0, InteractionKernel::power_law(2.0), 2};
  const auto e = enumerate_chain(gp, 1.0);
  CHECK(susceptibility_from_covariance(e, 1, ChiMode::FirstSite) == doctest::Approx(1 + 2 * std::tanh(1.0)));
  CHECK(susceptibility_from_covariance(e, 1, ChiMode::Bulk) == doctest::Approx(1 + 2 * std::tanh(1.0)));
  CHECK(susceptibility_from_covariance(e, 0, ChiMode::Bulk) == doctest::Approx(1.0));
}

TEST_CASE("w path examples") {
  const Polymer straight(std::vector<Step>(4, Step::PlusE1));
  const auto w = build_w_path(straight, 1.0);
  CHECK(w.value(0.0) == std::vector<double>{0.0, 0.0});
  CHECK(w.value(1.0) == std::vector<double>{2.0, 0.0});
  CHECK(w.value(0.375) == std::vector<double>{0.75, 0.0});
  std::mt19937_64 g(4);
  std::vector<Step> steps(37);
  for (auto& s : steps) s = static_cast<Step>(g() % 4);
  const Polymer p(steps);
  const double sigma = 1.3;
  const auto path = build_w_path(p, sigma);
  const auto sites = p.sites();
  for (std::size_t k = 0; k <= 37; ++k) {
    const auto v = path.value(double(k) / 37.0);
    CHECK(v[0] == double(sites[k][0]) / (sigma * std::sqrt(37.0)));
    CHECK(v[1] == double(sites[k][1]) / (sigma * std::sqrt(37.0)));
  }
  CHECK_THROWS_AS(build_w_path(p, 0.0), ValidationError);
  CHECK_THROWS_AS(path.value(1.5), ValidationError);
}

TEST_CASE("spin-pair path equals the polymer path") {
  std::mt19937_64 g(5);
  const SpinChainPair s(random_chain(g, 50), random_chain(g, 50));
  const auto a = build_w_path(s, 0.7);
  const auto b = build_w_path(spins_to_polymer(s), 0.7);
  CHECK(a.nodes == b.nodes);
  const auto z = build_z_path(s.sigma1, 2.0);
  const auto ps = partial_sums(s.sigma1);
  for (double t : {0.0, 0.1, 0.33, 0.5, 1.0})
    CHECK(z.value(t)[0] == doctest::Approx(interpolate_sum(ps, t) / (2.0 * std::sqrt(50.0))).epsilon(1e-14));
}

TEST_CASE("marginal samples") {
  const Polymer straight(std::vector<Step>(4, Step::PlusE1));
  const std::vector<PathProcess> two{build_w_path(straight, 1.0), build_w_path(straight, 1.0)};
  const auto m = marginal_samples(two, 1.0);
  CHECK(m.size() == 2);
  CHECK(m.coords == std::vector<double>{2, 0, 2, 0});
  CHECK(m.weights == std::vector<double>{0.5, 0.5});
  const auto origin = marginal_samples(std::span(two).first(1), 0.0);
  CHECK(origin.coords == std::vector<double>{0, 0});
  std::vector<PathProcess> five(5, two[0]);
  const auto k = marginal_samples(five, 0.5);
  CHECK(k.size() == 5);
  for (double w : k.weights) CHECK(w == 0.2);
  CHECK_THROWS_AS(marginal_samples(two, -0.1), ValidationError);
}
