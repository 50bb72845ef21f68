#include <atomic>
#include <random>
#include <vector>

#include "doctest.h"
#include "polyscale/kernels.hpp"

using namespace polyscale;
using namespace polyscale::kernels;

TEST_CASE("cost matrix: parallel equals serial") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int dim : {1, 2})
    for (double p : {0.5, 1.0, 2.0})
      for (GroundNorm norm : {GroundNorm::Euclidean, GroundNorm::L1}) {
        std::vector<double> a(37 * dim), b(53 * dim);
        for (auto& x : a) x = u(g);
        for (auto& x : b) x = u(g);
        CHECK(cost_matrix_parallel(a, b, dim, p, norm) == cost_matrix_serial(a, b, dim, p, norm));
      }
  const std::vector<double> o{0, 0}, q{3, 4};
  CHECK(cost_matrix_serial(o, q, 2, 1.0, GroundNorm::Euclidean)[0] == 5.0);
  CHECK(cost_matrix_serial(o, q, 2, 2.0, GroundNorm::Euclidean)[0] == 25.0);
  CHECK(cost_matrix_serial(o, q, 2, 1.0, GroundNorm::L1)[0] == 7.0);
}

TEST_CASE("chain state energies: parallel equals serial and direct") {
  const KernelTable t(InteractionKernel::power_law(1.5), 10);
  const auto par = chain_state_energies_parallel(10, t);
  CHECK(par == chain_state_energies_serial(10, t));
  for (std::uint64_t s : {0ull, 1ull, 0x155ull, 0x3ffull}) {
    SpinChain c(10);
    for (int i = 0; i < 10; ++i) c[i] = (s >> i) & 1 ? 1 : -1;
    CHECK(par[s] == doctest::Approx(chain_energy(c, t)).epsilon(1e-13));
  }
}

TEST_CASE("lag products: packed equals reference") {
  std::mt19937_64 g(2);
  for (std::size_t n : {1u, 2u, 63u, 64u, 65u, 200u, 1000u}) {
    SpinChain c(n);
    for (auto& x : c) x = (g() & 1) ? 1 : -1;
    const std::size_t kmax = std::min<std::size_t>(n - 1, 70);
    std::vector<std::int64_t> a(kmax + 1), b(kmax + 1);
    lag_products(c, kmax, a);
    lag_products_reference(c, kmax, b);
    CHECK(a == b);
    CHECK(a[0] == std::int64_t(n));
  }
}

TEST_CASE("replica loops visit every index once and propagate errors") {
  std::vector<int> hits(100, 0);
  for_each_replica_parallel(100, [&](std::size_t r) { hits[r] += 1; });
  for (int h : hits) CHECK(h == 1);
  std::vector<int> serial(100, 0);
  for_each_replica_serial(100, [&](std::size_t r) { serial[r] += 1; });
  CHECK(serial == hits);
  CHECK_THROWS_AS(for_each_replica_parallel(10,
                                            [](std::size_t r) {
                                              if (r == 7) throw ValidationError("boom");
                                            }),
                  ValidationError);
}
