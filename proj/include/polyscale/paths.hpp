#pragma once

// Partial sums, block decomposition, rescaled path processes and the
// variance / susceptibility statistics of the spin chains.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyscale/exact.hpp"
#include "polyscale/model.hpp"
#include "polyscale/sampler.hpp"
#include "polyscale/stats.hpp"
#include "polyscale/wasserstein.hpp"

namespace polyscale {

struct BlockScheme {
  std::size_t n = 0;
  std::size_t ell = 1;
  std::size_t m = 0;
  std::optional<double> delta;

  static BlockScheme with_ell(std::size_t n, std::size_t ell);
  /// ell = floor(n^delta), delta < 1/4.
  static BlockScheme with_delta(std::size_t n, double delta);
  void validate() const;
  /// ell^3 / m, the quantity that must vanish along the schedule.
  double lyapunov_ratio() const;
};

/// S_0 = 0, S_k = sum_{i<=k} x_i.
std::vector<std::int64_t> partial_sums(std::span<const std::int8_t> chain);
std::vector<Site> partial_sums(const Polymer& p);

/// The m block sums of consecutive ell-blocks; indices past m * ell are left out.
std::vector<std::int64_t> make_blocks(std::span<const std::int8_t> chain, const BlockScheme& scheme);

/// Lag cutoff min(n - 1, ceil(sqrt(n))).
std::size_t susceptibility_cutoff(std::size_t n);

enum class ChiMode {
  /// Var(s_1) + 2 sum_k Cov(s_1, s_{1+k}).
  FirstSite,
  /// Each lag covariance averaged over all admissible sites.
  Bulk,
};

/// Susceptibility from a covariance function cov(i, j) on sites 0..n-1.
template <class Cov>
double susceptibility(std::size_t n, std::size_t kcut, ChiMode mode, Cov&& cov) {
  CompensatedSum s;
  for (std::size_t k = 0; k <= kcut && k < n; ++k) {
    double c = 0.0;
    if (mode == ChiMode::FirstSite) {
      c = cov(0, k);
    } else {
      CompensatedSum a;
      for (std::size_t i = 0; i + k < n; ++i) a += cov(i, i + k);
      c = a.value() / static_cast<double>(n - k);
    }
    s += k == 0 ? c : 2.0 * c;
  }
  return s.value();
}

double susceptibility_from_covariance(const ExactSummary& chain, std::size_t kcut, ChiMode mode);

struct HypothesisStats {
  double var_ratio = 0.0;
  double block_var_ratio = 0.0;
  double third_moment_max = 0.0;
  /// Bulk-averaged estimate; the normalization of the path process.
  double chi_hat = 0.0;
  double chi_hat_first_site = 0.0;
  std::size_t k_cut = 0;
  std::size_t samples = 0;
  double var_ratio_se = 0.0;
  double block_var_ratio_se = 0.0;
  double chi_hat_se = 0.0;
};

/// Integer moment accumulator over independent +-1 chains of one length.
/// Merging is exact, so results do not depend on accumulation order.
class ChainMoments {
 public:
  ChainMoments() = default;
  ChainMoments(std::size_t n, const BlockScheme& scheme);

  void add(std::span<const std::int8_t> chain);
  ChainMoments& operator+=(const ChainMoments& o);
  ChainMoments& operator-=(const ChainMoments& o);

  std::int64_t count() const { return count_; }
  std::size_t n() const { return n_; }
  std::size_t k_cut() const { return kcut_; }
  HypothesisStats stats() const;
  double chi_hat() const;

 private:
  std::size_t n_ = 0, kcut_ = 0, ell_ = 1, m_ = 0;
  std::int64_t count_ = 0, sum_s_ = 0, sum_s2_ = 0;
  std::vector<std::int64_t> site_sum_, site_abs3_, block_sum_, block_sq_, lag_, first_lag_;
};

/// Jackknifed statistics from per-group accumulators.
HypothesisStats hypothesis_stats(std::span<const ChainMoments> groups);
/// Pools both chains of every configuration, configs of replica r going to group r % groups.
HypothesisStats hypothesis_stats(const SampleBatch& batch, const BlockScheme& scheme, int groups = 20);

struct PathProcess {
  int dim = 2;
  std::size_t n = 0;
  double sigma = 1.0;
  /// n + 1 rescaled node values, row-major with `dim` entries each.
  std::vector<double> nodes;

  /// Linear interpolation between nodes k / n; t in [0, 1].
  std::vector<double> value(double t) const;
};

/// W_n(t) = (S_k + (nt - k)(S_{k+1} - S_k)) / (sigma sqrt(n)).
PathProcess build_w_path(const Polymer& p, double sigma);
PathProcess build_w_path(const SpinChainPair& s, double sigma);
/// Z_t(n) for a single chain.
PathProcess build_z_path(std::span<const std::int8_t> chain, double sigma);

/// Equal-weight measure of the path values at time t.
EmpiricalMeasure marginal_samples(std::span<const PathProcess> paths, double t);

/// Unnormalized path value S_{nt} of a chain by interpolation, from partial sums.
double interpolate_sum(std::span<const std::int64_t> s, double t);

}  // namespace polyscale
