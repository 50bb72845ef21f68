#include "polyscale/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyscale/kernels.hpp"
#include "polyscale/stats.hpp"

namespace polyscale {

namespace {

constexpr std::uint64_t kShard = 4096;

void check_chain_size(std::size_t n, std::size_t cap) {
  if (n < 1) throw ValidationError("N must be >= 1");
  if (n > cap) throw ValidationError("N too large for exact enumeration (limit " + std::to_string(cap) + ")");
}

/// Normalized probabilities from log-weights, max-shifted; returns log Z.
double normalize(std::vector<double>& logw) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logw) mx = std::max(mx, v);
  CompensatedSum z;
  for (auto& v : logw) {
    v = std::exp(v - mx);
    z += v;
  }
  const double zt = z.value();
  for (auto& v : logw) v /= zt;
  return mx + std::log(zt);
}

/// Sums f(state, acc) over [0, states) in fixed shards merged in shard order.
template <class Acc, class F>
Acc sharded_sum(std::uint64_t states, std::size_t width, F&& f) {
  const std::uint64_t shards = (states + kShard - 1) / kShard;
  std::vector<std::vector<double>> partial(shards, std::vector<double>(width, 0.0));
#pragma omp parallel for schedule(static)
  for (std::int64_t sh = 0; sh < static_cast<std::int64_t>(shards); ++sh) {
    auto& acc = partial[static_cast<std::size_t>(sh)];
    const std::uint64_t lo = static_cast<std::uint64_t>(sh) * kShard;
    const std::uint64_t hi = std::min(states, lo + kShard);
    for (std::uint64_t s = lo; s < hi; ++s) f(s, acc);
  }
  std::vector<CompensatedSum> total(width);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < width; ++k) total[k] += p[k];
  Acc out(width);
  for (std::size_t k = 0; k < width; ++k) out[k] = total[k].value();
  return out;
}

}  // namespace

SpinChain chain_from_index(std::uint64_t index, std::size_t n) {
  SpinChain c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = (index >> i) & 1u ? 1 : -1;
  return c;
}

std::uint64_t chain_index(std::span<const std::int8_t> chain) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (chain[i] > 0) s |= std::uint64_t{1} << i;
  return s;
}

Polymer polymer_from_index(std::uint64_t index, std::size_t n) {
  std::vector<Step> steps(n);
  for (std::size_t i = 0; i < n; ++i) {
    steps[i] = static_cast<Step>(index & 3u);
    index >>= 2;
  }
  return Polymer(std::move(steps));
}

std::vector<double> chain_probabilities(std::size_t n, double beta_eff, const InteractionKernel& k) {
  check_chain_size(n, kMaxChainEnumeration);
  const KernelTable t(k, n);
  auto logw = kernels::chain_state_energies_parallel(n, t);
  for (auto& e : logw) e *= beta_eff;
  normalize(logw);
  return logw;
}

ExactSummary enumerate_chain(const GibbsParams& g, double beta_eff) {
  g.validate();
  const std::size_t n = g.n;
  check_chain_size(n, kMaxChainEnumeration);
  const KernelTable t(g.kernel, n);
  const auto energies = kernels::chain_state_energies_parallel(n, t);
  std::vector<double> p(energies.size());
  for (std::size_t s = 0; s < p.size(); ++s) p[s] = beta_eff * energies[s];
  ExactSummary out;
  out.n = n;
  out.log_z = normalize(p);

  // layout: [energy, site sums (n), pair sums (n*n upper triangle incl. diag)]
  const std::size_t width = 1 + n + n * n;
  const auto acc = sharded_sum<std::vector<double>>(
      energies.size(), width, [&](std::uint64_t s, std::vector<double>& a) {
        const double w = p[s];
        a[0] += w * energies[s];
        for (std::size_t i = 0; i < n; ++i) {
          const double si = (s >> i) & 1u ? w : -w;
          a[1 + i] += si;
          for (std::size_t j = i; j < n; ++j) a[1 + n + i * n + j] += (s >> j) & 1u ? si : -si;
        }
      });
  out.energy_mean = acc[0];
  out.site_means.assign(acc.begin() + 1, acc.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  out.pair_covariances.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double c = acc[1 + n + i * n + j] - out.site_means[i] * out.site_means[j];
      out.pair_covariances[i * n + j] = c;
      out.pair_covariances[j * n + i] = c;
    }
  return out;
}

std::vector<double> polymer_probabilities(const GibbsParams& g) {
  g.validate();
  check_chain_size(g.n, kMaxPolymerEnumeration);
  const KernelTable t(g.kernel, g.n);
  const std::uint64_t states = std::uint64_t{1} << (2 * g.n);
  const double coupling = g.kernel.sign() * g.beta;
  std::vector<double> logw(states);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(states); ++s)
    logw[static_cast<std::size_t>(s)] =
        coupling == 0.0 ? 0.0 : coupling * hamiltonian(polymer_from_index(static_cast<std::uint64_t>(s), g.n), t);
  normalize(logw);
  return logw;
}

ExactSummary enumerate_polymer(const GibbsParams& g) {
  g.validate();
  const std::size_t n = g.n;
  check_chain_size(n, kMaxPolymerEnumeration);
  const KernelTable t(g.kernel, n);
  const std::uint64_t states = std::uint64_t{1} << (2 * n);
  const double coupling = g.kernel.sign() * g.beta;
  std::vector<double> h(states), p(states);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(states); ++s) {
    const auto idx = static_cast<std::size_t>(s);
    h[idx] = hamiltonian(polymer_from_index(static_cast<std::uint64_t>(s), n), t);
    p[idx] = coupling * h[idx];
  }
  ExactSummary out;
  out.n = n;
  out.log_z = normalize(p);

  // layout: [energy, |S|^2, |S|_1^2, means (2n), inner products (n*n)]
  const std::size_t width = 3 + 2 * n + n * n;
  const auto acc = sharded_sum<std::vector<double>>(states, width, [&](std::uint64_t s, std::vector<double>& a) {
    const double w = p[s];
    std::array<int, kMaxPolymerEnumeration * 2> x{};
    std::int64_t ex = 0, ey = 0;
    std::uint64_t code = s;
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = step_vector(static_cast<Step>(code & 3u));
      code >>= 2;
      x[2 * i] = v[0];
      x[2 * i + 1] = v[1];
      ex += v[0];
      ey += v[1];
    }
    a[0] += w * h[s];
    a[1] += w * static_cast<double>(ex * ex + ey * ey);
    const double l1 = static_cast<double>(std::abs(ex) + std::abs(ey));
    a[2] += w * l1 * l1;
    for (std::size_t i = 0; i < n; ++i) {
      a[3 + 2 * i] += w * x[2 * i];
      a[4 + 2 * i] += w * x[2 * i + 1];
      for (std::size_t j = i; j < n; ++j)
        a[3 + 2 * n + i * n + j] += w * (x[2 * i] * x[2 * j] + x[2 * i + 1] * x[2 * j + 1]);
    }
  });
  out.energy_mean = acc[0];
  out.end_to_end_sq = acc[1];
  out.end_to_end_l1_sq = acc[2];
  out.site_means.assign(acc.begin() + 3, acc.begin() + 3 + static_cast<std::ptrdiff_t>(2 * n));
  out.pair_covariances.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double c = acc[3 + 2 * n + i * n + j] - out.site_means[2 * i] * out.site_means[2 * j] -
                       out.site_means[2 * i + 1] * out.site_means[2 * j + 1];
      out.pair_covariances[i * n + j] = c;
      out.pair_covariances[j * n + i] = c;
    }
  return out;
}

double evaluate(const MonotoneFunction& f, std::span<const std::int8_t> chain) {
  auto window = [&](std::size_t a, std::size_t b) {
    int s = 0;
    for (std::size_t j = a; j <= b && j < chain.size(); ++j) s += chain[j];
    return s;
  };
  return std::visit(
      [&](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, monotone::Site>)
          return fn.i < chain.size() ? chain[fn.i] : throw ValidationError("site index out of range");
        else if constexpr (std::is_same_v<T, monotone::PartialSum>)
          return window(fn.first, fn.last);
        else
          return window(fn.first, fn.last) >= fn.threshold ? 1.0 : 0.0;
      },
      f);
}

std::vector<MonotoneFunction> monotone_family(std::size_t n) {
  std::vector<MonotoneFunction> fam;
  for (std::size_t i = 0; i < n; ++i) fam.emplace_back(monotone::Site{i});
  for (std::size_t k = 1; k < n; ++k) fam.emplace_back(monotone::PartialSum{0, k});
  fam.emplace_back(monotone::PartialSum{n / 4, (3 * n) / 4 == 0 ? 0 : (3 * n) / 4 - 1});
  const int ni = static_cast<int>(n);
  for (int c : {-ni / 2, 0, 1, ni / 2}) fam.emplace_back(monotone::Threshold{0, n - 1, c});
  fam.emplace_back(monotone::Threshold{0, n / 2, 0});
  fam.emplace_back(monotone::Threshold{n / 2, n - 1, 1});
  return fam;
}

std::vector<double> association_matrix(const GibbsParams& g, double beta_eff,
                                       std::span<const MonotoneFunction> family) {
  g.validate();
  check_chain_size(g.n, kMaxAssociationEnumeration);
  const auto p = chain_probabilities(g.n, beta_eff, g.kernel);
  const std::size_t m = family.size();
  // layout: [means (m), products (m*m)]
  const auto acc = sharded_sum<std::vector<double>>(p.size(), m + m * m, [&](std::uint64_t s, std::vector<double>& a) {
    const SpinChain c = chain_from_index(s, g.n);
    std::vector<double> v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = evaluate(family[k], c);
    const double w = p[s];
    for (std::size_t k = 0; k < m; ++k) {
      a[k] += w * v[k];
      for (std::size_t l = k; l < m; ++l) a[m + k * m + l] += w * v[k] * v[l];
    }
  });
  std::vector<double> cov(m * m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = k; l < m; ++l) {
      const double c = acc[m + k * m + l] - acc[k] * acc[l];
      cov[k * m + l] = c;
      cov[l * m + k] = c;
    }
  return cov;
}

double check_positive_association(const GibbsParams& g, double beta_eff, const MonotoneFunction& f,
                                  const MonotoneFunction& g2) {
  const MonotoneFunction fam[2] = {f, g2};
  return association_matrix(g, beta_eff, fam)[1];
}

NewmanWrightGap newman_wright_gap(const GibbsParams& g, double beta_eff, std::span<const double> r) {
  g.validate();
  const std::size_t n = g.n;
  check_chain_size(n, kMaxAssociationEnumeration);
  if (r.size() != n) throw ValidationError("need one frequency per site");
  const auto summary = enumerate_chain(g, beta_eff);
  const auto p = chain_probabilities(n, beta_eff, g.kernel);
  const auto acc = sharded_sum<std::vector<double>>(p.size(), 2, [&](std::uint64_t s, std::vector<double>& a) {
    double phase = 0.0;
    for (std::size_t j = 0; j < n; ++j) phase += (s >> j) & 1u ? r[j] : -r[j];
    a[0] += p[s] * std::cos(phase);
    a[1] += p[s] * std::sin(phase);
  });
  std::complex<double> joint(acc[0], acc[1]);
  std::complex<double> prod(1.0, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    prod *= std::complex<double>(std::cos(r[j]), summary.site_means[j] * std::sin(r[j]));
  NewmanWrightGap out;
  out.lhs = std::abs(joint - prod);
  double rhs = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (j != k) rhs += std::abs(r[j] * r[k]) * summary.covariance(j, k);
  out.rhs = 0.5 * rhs;
  return out;
}

}  // namespace polyscale
