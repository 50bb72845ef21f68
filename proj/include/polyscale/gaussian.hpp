#pragma once

// Distances and convergence diagnostics against centred Gaussian targets.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "polyscale/stats.hpp"
#include "polyscale/wasserstein.hpp"

namespace polyscale {

enum class ReferenceMode { OneD, TwoD };

ReferenceMode parse_reference_mode(const std::string& s);

/// Exact p-cost int_0^1 |F^-1(u) - sqrt(t) Phi^-1(u)|^p du between a 1D
/// measure and N(0, t), integrating over the measure's quantile partition.
/// Closed forms for p = 1, 2; adaptive Gauss-Kronrod otherwise.
double gaussian_cost_1d(const EmpiricalMeasure& mu, double t, double p);
/// Same for equally weighted, already sorted atoms.
double gaussian_cost_sorted(std::span<const double> sorted, double t, double p);

/// count iid draws from N(0, t I_2), row-major.
EmpiricalMeasure gaussian_reference_sample(double t, std::size_t count, std::uint64_t seed);

/// Every k-th atom so that at most `count` remain, weights made uniform.
EmpiricalMeasure thin_atoms(const EmpiricalMeasure& mu, std::size_t count);

struct DistanceEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// d_p between mu and N(0, t I_dim). OneD mode is exact in the reference;
/// TwoD mode solves exact OT against a fixed-seed reference sample of
/// ref_samples atoms (mu thinned to the same size) and reports a paired
/// delete-a-group jackknife error over `groups` groups (0 disables).
DistanceEstimate d_p_to_gaussian(const EmpiricalMeasure& mu, double t, double p, ReferenceMode mode,
                                 std::size_t ref_samples, std::uint64_t seed, int groups = 0);

/// E|Z|^p for Z ~ N(0, t I_dim), dim in {1, 2}.
double gaussian_abs_moment(int dim, double t, double p);

struct GaussianTarget {
  int dim = 1;
  double t = 1.0;
  std::size_t ref_samples = 512;
  std::uint64_t seed = 0;
};

using Reference = std::variant<GaussianTarget, EmpiricalMeasure>;

struct BickelFreedmanReport {
  std::vector<double> d;
  std::vector<double> moment;
  std::vector<double> moment_gap;
  std::vector<double> cdf_gap;
  double reference_moment = 0.0;
  bool d_shrinks = false;
  bool moment_shrinks = false;
  bool cdf_shrinks = false;
  /// d_p shrinks while the moment or CDF gap does not.
  bool inconsistent = false;
  bool convergent = false;
};

/// Sup-CDF gap in 1D; max gap of the joint CDF on a 9 x 9 grid in 2D.
double cdf_gap(const EmpiricalMeasure& mu, const Reference& ref);
double abs_moment(const EmpiricalMeasure& mu, double p);

/// Values at the limit (all <= 1e-12) or a Spearman trend below -0.8 with
/// last < first.
bool shrinking(std::span<const double> v);

BickelFreedmanReport bickel_freedman_check(std::span<const EmpiricalMeasure> seq, const Reference& ref, double p);

}  // namespace polyscale
