#include "polyscale/paths.hpp"

#include <algorithm>
#include <cmath>

#include "polyscale/kernels.hpp"

namespace polyscale {

BlockScheme BlockScheme::with_ell(std::size_t n, std::size_t ell) {
  BlockScheme b;
  b.n = n;
  b.ell = ell;
  b.m = ell ? n / ell : 0;
  b.validate();
  return b;
}

BlockScheme BlockScheme::with_delta(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw ValidationError("block exponent delta must lie in (0, 1/4)");
  if (n < 1) throw ValidationError("n must be >= 1");
  // floor(n^delta) with a guard against pow rounding just below an integer
  const double x = std::pow(static_cast<double>(n), delta);
  auto ell = static_cast<std::size_t>(std::floor(x + 1e-12));
  ell = std::max<std::size_t>(ell, 1);
  BlockScheme b = with_ell(n, ell);
  b.delta = delta;
  return b;
}

void BlockScheme::validate() const {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (ell < 1 || ell > n) throw ValidationError("block size must satisfy 1 <= ell <= n");
  if (m != n / ell) throw ValidationError("m must equal floor(n / ell)");
  if (delta && !(*delta < 0.25)) throw ValidationError("block exponent delta must be < 1/4");
}

double BlockScheme::lyapunov_ratio() const {
  const double l = static_cast<double>(ell);
  return l * l * l / static_cast<double>(m);
}

std::vector<std::int64_t> partial_sums(std::span<const std::int8_t> chain) {
  if (chain.empty()) throw ValidationError("partial sums of an empty sequence");
  std::vector<std::int64_t> s(chain.size() + 1, 0);
  for (std::size_t i = 0; i < chain.size(); ++i) s[i + 1] = s[i] + chain[i];
  return s;
}

std::vector<Site> partial_sums(const Polymer& p) {
  if (p.empty()) throw ValidationError("partial sums of an empty polymer");
  return p.sites();
}

std::vector<std::int64_t> make_blocks(std::span<const std::int8_t> chain, const BlockScheme& scheme) {
  scheme.validate();
  if (chain.size() != scheme.n) throw ValidationError("block scheme length does not match the chain");
  std::vector<std::int64_t> y(scheme.m, 0);
  for (std::size_t j = 0; j < scheme.m; ++j)
    for (std::size_t k = j * scheme.ell; k < (j + 1) * scheme.ell; ++k) y[j] += chain[k];
  return y;
}

std::size_t susceptibility_cutoff(std::size_t n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (k * k < n) ++k;
  while (k > 0 && (k - 1) * (k - 1) >= n) --k;
  return std::min(n - 1, k);
}

double susceptibility_from_covariance(const ExactSummary& chain, std::size_t kcut, ChiMode mode) {
  return susceptibility(chain.n, kcut, mode, [&](std::size_t i, std::size_t j) { return chain.covariance(i, j); });
}

ChainMoments::ChainMoments(std::size_t n, const BlockScheme& scheme)
    : n_(n),
      kcut_(susceptibility_cutoff(n)),
      ell_(scheme.ell),
      m_(scheme.m),
      site_sum_(n, 0),
      site_abs3_(n, 0),
      block_sum_(scheme.m, 0),
      block_sq_(scheme.m, 0),
      lag_(kcut_ + 1, 0),
      first_lag_(kcut_ + 1, 0) {
  scheme.validate();
  if (scheme.n != n) throw ValidationError("block scheme length does not match the chain");
}

void ChainMoments::add(std::span<const std::int8_t> chain) {
  if (chain.size() != n_) throw ValidationError("chain length does not match accumulator");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::int64_t x = chain[i];
    s += x;
    site_sum_[i] += x;
    site_abs3_[i] += std::abs(x * x * x);
  }
  sum_s_ += s;
  sum_s2_ += s * s;
  for (std::size_t j = 0; j < m_; ++j) {
    std::int64_t y = 0;
    for (std::size_t k = j * ell_; k < (j + 1) * ell_; ++k) y += chain[k];
    block_sum_[j] += y;
    block_sq_[j] += y * y;
  }
  std::vector<std::int64_t> lag(kcut_ + 1);
  kernels::lag_products(chain, kcut_, lag);
  for (std::size_t k = 0; k <= kcut_; ++k) {
    lag_[k] += lag[k];
    first_lag_[k] += std::int64_t{chain[0]} * chain[k];
  }
  ++count_;
}

namespace {

template <class F>
void zip_apply(std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, F f) {
  if (a.size() != b.size()) throw ValidationError("accumulator shapes differ");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = f(a[i], b[i]);
}

}  // namespace

ChainMoments& ChainMoments::operator+=(const ChainMoments& o) {
  if (o.n_ != n_ || o.ell_ != ell_) throw ValidationError("accumulator shapes differ");
  auto add = [](std::int64_t x, std::int64_t y) { return x + y; };
  count_ += o.count_;
  sum_s_ += o.sum_s_;
  sum_s2_ += o.sum_s2_;
  zip_apply(site_sum_, o.site_sum_, add);
  zip_apply(site_abs3_, o.site_abs3_, add);
  zip_apply(block_sum_, o.block_sum_, add);
  zip_apply(block_sq_, o.block_sq_, add);
  zip_apply(lag_, o.lag_, add);
  zip_apply(first_lag_, o.first_lag_, add);
  return *this;
}

ChainMoments& ChainMoments::operator-=(const ChainMoments& o) {
  if (o.n_ != n_ || o.ell_ != ell_) throw ValidationError("accumulator shapes differ");
  auto sub = [](std::int64_t x, std::int64_t y) { return x - y; };
  count_ -= o.count_;
  sum_s_ -= o.sum_s_;
  sum_s2_ -= o.sum_s2_;
  zip_apply(site_sum_, o.site_sum_, sub);
  zip_apply(site_abs3_, o.site_abs3_, sub);
  zip_apply(block_sum_, o.block_sum_, sub);
  zip_apply(block_sq_, o.block_sq_, sub);
  zip_apply(lag_, o.lag_, sub);
  zip_apply(first_lag_, o.first_lag_, sub);
  return *this;
}

double ChainMoments::chi_hat() const {
  if (count_ < 2) throw ValidationError("need at least 2 samples");
  const double M = static_cast<double>(count_);
  CompensatedSum chi;
  for (std::size_t k = 0; k <= kcut_; ++k) {
    CompensatedSum mm;
    for (std::size_t i = 0; i + k < n_; ++i)
      mm += static_cast<double>(site_sum_[i]) * static_cast<double>(site_sum_[i + k]);
    const double c = (static_cast<double>(lag_[k]) - mm.value() / M) / ((M - 1.0) * static_cast<double>(n_ - k));
    chi += k == 0 ? c : 2.0 * c;
  }
  return chi.value();
}

HypothesisStats ChainMoments::stats() const {
  if (count_ < 2) throw ValidationError("need at least 2 samples");
  const double M = static_cast<double>(count_);
  HypothesisStats h;
  h.samples = static_cast<std::size_t>(count_);
  h.k_cut = kcut_;
  const double ss = static_cast<double>(sum_s_);
  h.var_ratio = (static_cast<double>(sum_s2_) - ss * ss / M) / (M - 1.0) / static_cast<double>(n_);
  CompensatedSum bv;
  for (std::size_t j = 0; j < m_; ++j) {
    const double b = static_cast<double>(block_sum_[j]);
    bv += (static_cast<double>(block_sq_[j]) - b * b / M) / (M - 1.0);
  }
  h.block_var_ratio = m_ ? bv.value() / static_cast<double>(m_ * ell_) : 0.0;
  std::int64_t a3 = 0;
  for (auto v : site_abs3_) a3 = std::max(a3, v);
  h.third_moment_max = static_cast<double>(a3) / M;
  h.chi_hat = chi_hat();
  CompensatedSum first;
  const double m0 = static_cast<double>(site_sum_[0]) / M;
  for (std::size_t k = 0; k <= kcut_; ++k) {
    const double c = (static_cast<double>(first_lag_[k]) - m0 * static_cast<double>(site_sum_[k])) / (M - 1.0);
    first += k == 0 ? c : 2.0 * c;
  }
  h.chi_hat_first_site = first.value();
  return h;
}

HypothesisStats hypothesis_stats(std::span<const ChainMoments> groups) {
  if (groups.empty()) throw ValidationError("no accumulators");
  ChainMoments total = groups[0];
  for (std::size_t g = 1; g < groups.size(); ++g) total += groups[g];
  HypothesisStats h = total.stats();
  const int G = static_cast<int>(groups.size());
  if (G < 2) return h;
  std::vector<HypothesisStats> loo(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ChainMoments rest = total;
    rest -= groups[g];
    loo[g] = rest.stats();
  }
  h.var_ratio_se = group_jackknife(G, [&](int g) { return g < 0 ? h.var_ratio : loo[g].var_ratio; }).se;
  h.block_var_ratio_se =
      group_jackknife(G, [&](int g) { return g < 0 ? h.block_var_ratio : loo[g].block_var_ratio; }).se;
  h.chi_hat_se = group_jackknife(G, [&](int g) { return g < 0 ? h.chi_hat : loo[g].chi_hat; }).se;
  return h;
}

HypothesisStats hypothesis_stats(const SampleBatch& batch, const BlockScheme& scheme, int groups) {
  if (batch.configs.empty()) throw ValidationError("need at least 2 samples");
  const std::size_t n = batch.configs.front().size();
  const std::size_t G = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(groups, 1)),
                                                                        batch.replicas));
  std::vector<ChainMoments> acc(G, ChainMoments(n, scheme));
  for (std::size_t c = 0; c < batch.configs.size(); ++c) {
    const std::size_t r = batch.n_samples ? c / batch.n_samples : 0;
    auto& a = acc[r % G];
    a.add(batch.configs[c].sigma1);
    a.add(batch.configs[c].sigma2);
  }
  return hypothesis_stats(acc);
}

double interpolate_sum(std::span<const std::int64_t> s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0, 1]");
  if (s.size() < 2) throw ValidationError("need at least one step");
  const std::size_t n = s.size() - 1;
  double x = t * static_cast<double>(n);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9) x = r;
  auto k = static_cast<std::size_t>(std::floor(x));
  if (k >= n) return static_cast<double>(s[n]);
  const double f = x - static_cast<double>(k);
  return static_cast<double>(s[k]) + f * static_cast<double>(s[k + 1] - s[k]);
}

std::vector<double> PathProcess::value(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0, 1]");
  const auto d = static_cast<std::size_t>(dim);
  double x = t * static_cast<double>(n);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9) x = r;
  auto k = static_cast<std::size_t>(std::floor(x));
  std::vector<double> out(d);
  if (k >= n) {
    for (std::size_t c = 0; c < d; ++c) out[c] = nodes[n * d + c];
    return out;
  }
  const double f = x - static_cast<double>(k);
  for (std::size_t c = 0; c < d; ++c) {
    const double a = nodes[k * d + c], b = nodes[(k + 1) * d + c];
    out[c] = f == 0.0 ? a : a + f * (b - a);
  }
  return out;
}

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be > 0");
}

}  // namespace

PathProcess build_w_path(const Polymer& p, double sigma) {
  check_sigma(sigma);
  if (p.empty()) throw ValidationError("path of an empty polymer");
  PathProcess w;
  w.dim = 2;
  w.n = p.size();
  w.sigma = sigma;
  const double scale = sigma * std::sqrt(static_cast<double>(w.n));
  const auto sites = p.sites();
  w.nodes.reserve(2 * sites.size());
  for (const auto& s : sites) {
    w.nodes.push_back(static_cast<double>(s[0]) / scale);
    w.nodes.push_back(static_cast<double>(s[1]) / scale);
  }
  return w;
}

PathProcess build_w_path(const SpinChainPair& s, double sigma) { return build_w_path(spins_to_polymer(s), sigma); }

PathProcess build_z_path(std::span<const std::int8_t> chain, double sigma) {
  check_sigma(sigma);
  const auto s = partial_sums(chain);
  PathProcess z;
  z.dim = 1;
  z.n = chain.size();
  z.sigma = sigma;
  const double scale = sigma * std::sqrt(static_cast<double>(z.n));
  z.nodes.reserve(s.size());
  for (auto v : s) z.nodes.push_back(static_cast<double>(v) / scale);
  return z;
}

EmpiricalMeasure marginal_samples(std::span<const PathProcess> paths, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0, 1]");
  if (paths.empty()) throw ValidationError("no paths");
  const int dim = paths.front().dim;
  std::vector<double> c;
  c.reserve(paths.size() * static_cast<std::size_t>(dim));
  for (const auto& p : paths) {
    if (p.dim != dim) throw ValidationError("paths of mixed dimension");
    const auto v = p.value(t);
    c.insert(c.end(), v.begin(), v.end());
  }
  return EmpiricalMeasure(dim, std::move(c));
}

}  // namespace polyscale
