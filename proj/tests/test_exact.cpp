#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "polyscale/exact.hpp"

using namespace polyscale;

namespace {

GibbsParams params(double beta, double alpha, std::size_t n) { return {beta, InteractionKernel::power_law(alpha), n}; }

double chain_state_prob(const std::vector<double>& p, const SpinChain& s) { return p[chain_index(s)]; }

}  // namespace

TEST_CASE("enumerate_chain at beta_eff = 0") {
  const auto s = enumerate_chain(params(0.0, 2.0, 4), 0.0);
  CHECK(s.log_z == doctest::Approx(4 * std::log(2.0)).epsilon(1e-15));
  for (double m : s.site_means) CHECK(std::abs(m) <= 1e-15);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(s.covariance(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("enumerate_chain two-site closed form") {
  const auto s = enumerate_chain(params(0.0, 2.0, 2), 1.0);
  CHECK(std::exp(s.log_z) == doctest::Approx(2 * std::exp(1.0) + 2 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(s.covariance(0, 1) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
}

TEST_CASE("enumerate_chain against a direct triple loop") {
  const std::size_t n = 3;
  const double beta_eff = 0.5;
  // Z, E s_i, E s_i s_j by explicit loops over the three spins.
  double z = 0, m[3] = {0, 0, 0}, c[3][3] = {};
  for (int a : {-1, 1})
    for (int b : {-1, 1})
      for (int d : {-1, 1}) {
        const int s[3] = {a, b, d};
        const double w = std::exp(beta_eff * (a * b + b * d + 0.25 * a * d));
        z += w;
        for (int i = 0; i < 3; ++i) {
          m[i] += w * s[i];
          for (int j = 0; j < 3; ++j) c[i][j] += w * s[i] * s[j];
        }
      }
  const auto e = enumerate_chain(params(0.0, 2.0, n), beta_eff);
  CHECK(e.log_z == doctest::Approx(std::log(z)).epsilon(1e-14));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(e.site_means[i] - m[i] / z) <= 1e-14);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(e.covariance(i, j) - (c[i][j] / z - m[i] * m[j] / (z * z))) <= 1e-14);
  }
}

TEST_CASE("enumeration caps") {
  CHECK_THROWS_AS(enumerate_chain(params(0.0, 2.0, kMaxChainEnumeration + 1), 0.1), ValidationError);
  CHECK_THROWS_AS(enumerate_polymer(params(0.1, 2.0, kMaxPolymerEnumeration + 1)), ValidationError);
  const auto fam = monotone_family(4);
  CHECK_THROWS_AS(check_positive_association(params(0.0, 2.0, 17), 0.1, fam[0], fam[1]), ValidationError);
}

TEST_CASE("enumerate_polymer at beta = 0") {
  const auto s = enumerate_polymer(params(0.0, 1.5, 5));
  CHECK(s.end_to_end_sq == doctest::Approx(5.0).epsilon(1e-14));
  // E max(|S1|, |S2|)^2 for the two independent +-1 walks of length 5, by direct sum.
  double l1 = 0;
  for (int a = 0; a < 32; ++a)
    for (int b = 0; b < 32; ++b) {
      int s1 = 0, s2 = 0;
      for (int i = 0; i < 5; ++i) {
        s1 += (a >> i) & 1 ? 1 : -1;
        s2 += (b >> i) & 1 ? 1 : -1;
      }
      const int mx = std::max(std::abs(s1), std::abs(s2));
      l1 += mx * mx / 1024.0;
    }
  CHECK(s.end_to_end_l1_sq == doctest::Approx(l1).epsilon(1e-14));
  const auto p = polymer_probabilities(params(0.0, 1.5, 3));
  REQUIRE(p.size() == 64);
  for (double x : p) CHECK(std::abs(x - 1.0 / 64) <= 1e-15);
}

TEST_CASE("polymer probabilities equal the test oracle and factorize") {
  for (std::size_t n = 2; n <= 5; ++n)
    for (double beta : {0.0, 0.5, 2.0}) {
      const auto g = params(beta, 1.5, n);
      const auto lib = polymer_probabilities(g);
      const auto ref = oracle::polymer_probabilities(n, beta, 1.5);
      const auto chain = chain_probabilities(n, beta / 2, g.kernel);
      for (std::uint64_t k = 0; k < lib.size(); ++k) {
        CHECK(std::abs(lib[k] - ref[k]) <= 1e-13);
        const auto s = polymer_to_spins(polymer_from_index(k, n));
        CHECK(std::abs(lib[k] - chain_state_prob(chain, s.sigma1) * chain_state_prob(chain, s.sigma2)) <= 1e-12);
      }
    }
}

TEST_CASE("polymer step covariances match the chain covariances") {
  const auto g = params(1.0, 1.5, 6);
  const auto p = enumerate_polymer(g);
  const auto c = enumerate_chain(g, 0.5);
  // E<X_i, X_j> - <EX_i, EX_j> = (Cov(s1_i, s1_j) + Cov(s2_i, s2_j)) / 2 = Cov_chain(i, j)
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(p.covariance(i, j) - c.covariance(i, j)) <= 1e-12);
  double e2 = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) e2 += c.covariance(i, j);
  CHECK(p.end_to_end_sq == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("positive association examples") {
  namespace mf = monotone;
  CHECK(std::abs(check_positive_association(params(0.0, 2.0, 4), 0.0, mf::Site{0}, mf::Site{1})) <= 1e-15);
  CHECK(check_positive_association(params(0.0, 2.0, 2), 1.0, mf::Site{0}, mf::Site{1}) ==
        doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(check_positive_association(params(0.0, 1.5, 8), 0.4, mf::PartialSum{0, 7}, mf::Site{0}) >= 0.0);
}

TEST_CASE("monotone family is monotone") {
  const std::size_t n = 6;
  const auto fam = monotone_family(n);
  for (const auto& f : fam)
    for (std::uint64_t s = 0; s < (1u << n); ++s)
      for (std::size_t i = 0; i < n; ++i) {
        if ((s >> i) & 1) continue;
        const auto lo = chain_from_index(s, n);
        const auto hi = chain_from_index(s | (1u << i), n);
        REQUIRE(evaluate(f, hi) >= evaluate(f, lo));
      }
}

TEST_CASE("association can fail without ferromagnetic couplings") {
  // Antiferromagnetic pair: Cov(s_1, s_2) = -tanh(1).
  namespace mf = monotone;
  CHECK(check_positive_association(params(0.0, 2.0, 2), -1.0, mf::Site{0}, mf::Site{1}) ==
        doctest::Approx(-std::tanh(1.0)).epsilon(1e-14));
}

TEST_CASE("association matrix agrees with pairwise calls") {
  const auto g = params(0.0, 1.5, 7);
  const auto fam = monotone_family(7);
  const auto m = association_matrix(g, 0.3, fam);
  const std::size_t k = fam.size();
  for (std::size_t i = 0; i < k; i += 3)
    for (std::size_t j = 0; j < k; j += 2)
      CHECK(std::abs(m[i * k + j] - check_positive_association(g, 0.3, fam[i], fam[j])) <= 1e-12);
}

TEST_CASE("Newman-Wright examples") {
  const std::vector<double> r3{0.3, -1.2, 2.0};
  auto z = newman_wright_gap(params(0.0, 2.0, 3), 0.0, r3);
  CHECK(std::abs(z.lhs) <= 1e-15);
  CHECK(std::abs(z.rhs) <= 1e-15);
  const std::vector<double> r2{1.0, 1.0};
  const auto two = newman_wright_gap(params(0.0, 2.0, 2), 1.0, r2);
  CHECK(two.rhs == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(two.lhs <= two.rhs + 1e-10);
  // Direct value: phi(1,1) = E cos(s1 + s2) = (1 + tanh 1)/2 cos 2 + (1 - tanh 1)/2; marginals cos(1)^2.
  const double t = std::tanh(1.0);
  CHECK(two.lhs == doctest::Approx(std::abs((1 + t) / 2 * std::cos(2.0) + (1 - t) / 2 - std::cos(1.0) * std::cos(1.0))).epsilon(1e-13));
  const std::vector<double> r6(6, 0.5);
  const auto six = newman_wright_gap(params(0.0, 1.5, 6), 0.3, r6);
  CHECK(six.lhs <= six.rhs + 1e-10);
}

TEST_CASE("Newman-Wright lhs against a direct characteristic function") {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + g() % 6;
    const double beta_eff = 0.1 * double(g() % 10);
    std::vector<double> r(n);
    for (auto& x : r) x = u(g);
    const auto p = oracle::chain_probabilities(n, beta_eff, 1.5);
    std::complex<double> phi = 0;
    std::vector<std::complex<double>> marg(n, 0.0);
    for (std::uint64_t s = 0; s < p.size(); ++s) {
      double arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        arg += r[i] * oracle::spin(s, i);
        marg[i] += p[s] * std::exp(std::complex<double>(0, r[i] * oracle::spin(s, i)));
      }
      phi += p[s] * std::exp(std::complex<double>(0, arg));
    }
    std::complex<double> prod = 1;
    for (auto& m : marg) prod *= m;
    const auto gap = newman_wright_gap(params(0.0, 1.5, n), beta_eff, r);
    CHECK(gap.lhs == doctest::Approx(std::abs(phi - prod)).epsilon(1e-10));
    CHECK(gap.lhs <= gap.rhs + 1e-10);
  }
}
