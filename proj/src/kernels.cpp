#include "polyscale/kernels.hpp"

#include <bit>
#include <cmath>

namespace polyscale::kernels {

namespace {

inline double ground_cost(const double* x, const double* y, int dim, double p, GroundNorm norm) {
  double d = 0.0;
  if (norm == GroundNorm::L1) {
    for (int k = 0; k < dim; ++k) d += std::abs(x[k] - y[k]);
    if (p == 1.0) return d;
    return std::pow(d, p);
  }
  for (int k = 0; k < dim; ++k) d += (x[k] - y[k]) * (x[k] - y[k]);
  if (p == 2.0) return d;
  if (p == 1.0) return std::sqrt(d);
  return std::pow(d, 0.5 * p);
}

inline double state_energy(std::uint64_t s, std::size_t n, const KernelTable& t) {
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int si = (s >> i) & 1u ? 1 : -1;
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row += ((s >> j) & 1u ? t[j - i] : -t[j - i]);
    e += si * row;
  }
  return e;
}

}  // namespace

std::vector<double> cost_matrix_parallel(std::span<const double> a, std::span<const double> b, int dim, double p,
                                         GroundNorm norm) {
  const std::size_t n = a.size() / static_cast<std::size_t>(dim);
  const std::size_t m = b.size() / static_cast<std::size_t>(dim);
  std::vector<double> c(n * m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    for (std::size_t j = 0; j < m; ++j)
      c[static_cast<std::size_t>(i) * m + j] =
          ground_cost(&a[static_cast<std::size_t>(i) * dim], &b[j * dim], dim, p, norm);
  return c;
}

std::vector<double> cost_matrix_serial(std::span<const double> a, std::span<const double> b, int dim, double p,
                                       GroundNorm norm) {
  const std::size_t n = a.size() / static_cast<std::size_t>(dim);
  const std::size_t m = b.size() / static_cast<std::size_t>(dim);
  std::vector<double> c(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c[i * m + j] = ground_cost(&a[i * dim], &b[j * dim], dim, p, norm);
  return c;
}

std::vector<double> chain_state_energies_parallel(std::size_t n, const KernelTable& t) {
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> e(states);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(states); ++s)
    e[static_cast<std::size_t>(s)] = state_energy(static_cast<std::uint64_t>(s), n, t);
  return e;
}

std::vector<double> chain_state_energies_serial(std::size_t n, const KernelTable& t) {
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<double> e(states);
  for (std::uint64_t s = 0; s < states; ++s) e[s] = state_energy(s, n, t);
  return e;
}

void lag_products(std::span<const std::int8_t> chain, std::size_t kmax, std::span<std::int64_t> out) {
  const std::size_t n = chain.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> w(words + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (chain[i] > 0) w[i >> 6] |= std::uint64_t{1} << (i & 63);
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (k >= n) {
      out[k] = 0;
      continue;
    }
    const std::size_t len = n - k;
    const std::size_t q0 = k >> 6, sh = k & 63;
    std::int64_t mismatch = 0;
    const std::size_t full = len >> 6;
    for (std::size_t q = 0; q < full; ++q) {
      std::uint64_t shifted = w[q + q0] >> sh;
      if (sh) shifted |= w[q + q0 + 1] << (64 - sh);
      mismatch += std::popcount(w[q] ^ shifted);
    }
    const std::size_t rem = len & 63;
    if (rem) {
      const std::size_t q = full;
      std::uint64_t shifted = w[q + q0] >> sh;
      if (sh && q + q0 + 1 < w.size()) shifted |= w[q + q0 + 1] << (64 - sh);
      const std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
      mismatch += std::popcount((w[q] ^ shifted) & mask);
    }
    out[k] = static_cast<std::int64_t>(len) - 2 * mismatch;
  }
}

void lag_products_reference(std::span<const std::int8_t> chain, std::size_t kmax, std::span<std::int64_t> out) {
  const std::size_t n = chain.size();
  for (std::size_t k = 0; k <= kmax; ++k) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i + k < n; ++i) s += chain[i] * chain[i + k];
    out[k] = s;
  }
}

}  // namespace polyscale::kernels
