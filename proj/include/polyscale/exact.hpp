#pragma once

// Brute-force enumeration for small systems. Everything here is exact up to
// floating-point summation and exists to check the samplers and estimators.

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "polyscale/model.hpp"

namespace polyscale {

constexpr std::size_t kMaxChainEnumeration = 20;
constexpr std::size_t kMaxPolymerEnumeration = 10;
constexpr std::size_t kMaxAssociationEnumeration = 16;

struct ExactSummary {
  double log_z = 0.0;
  /// Chains: E sigma_i. Polymers: E X_i interleaved as (x_1, y_1, x_2, ...).
  std::vector<double> site_means;
  /// Row-major N x N. Chains: Cov(sigma_i, sigma_j). Polymers:
  /// E<X_i, X_j> - <E X_i, E X_j>.
  std::vector<double> pair_covariances;
  /// Expected Hamiltonian (chains: sum_{i<j} V s_i s_j).
  double energy_mean = 0.0;
  /// Polymers only: E||S_N||^2 and E||S_N||_1^2.
  double end_to_end_sq = 0.0;
  double end_to_end_l1_sq = 0.0;
  std::size_t n = 0;

  double covariance(std::size_t i, std::size_t j) const { return pair_covariances[i * n + j]; }
};

/// Probabilities of all 2^N chain states at coupling beta_eff; bit i of the
/// index set means sigma_{i+1} = +1.
std::vector<double> chain_probabilities(std::size_t n, double beta_eff, const InteractionKernel& k);

/// Chain measure with weight exp(beta_eff sum_{i<j} V s_i s_j), N = g.n.
ExactSummary enumerate_chain(const GibbsParams& g, double beta_eff);

/// Probabilities of all 4^N polymers under exp(sign beta H); digit i (base 4)
/// of the index is the Step of X_{i+1}.
std::vector<double> polymer_probabilities(const GibbsParams& g);
ExactSummary enumerate_polymer(const GibbsParams& g);

SpinChain chain_from_index(std::uint64_t index, std::size_t n);
Polymer polymer_from_index(std::uint64_t index, std::size_t n);
std::uint64_t chain_index(std::span<const std::int8_t> chain);

/// Coordinate-wise non-decreasing observables of a +-1 chain.
namespace monotone {
struct Site {
  std::size_t i;
};
/// sum of sigma_j for j in [first, last] (0-based, inclusive)
struct PartialSum {
  std::size_t first;
  std::size_t last;
};
/// 1{ sum_{j in [first, last]} sigma_j >= threshold }
struct Threshold {
  std::size_t first;
  std::size_t last;
  int threshold;
};
}  // namespace monotone

using MonotoneFunction = std::variant<monotone::Site, monotone::PartialSum, monotone::Threshold>;

double evaluate(const MonotoneFunction& f, std::span<const std::int8_t> chain);
/// Single sites, prefix partial sums and thresholds on prefix sums for a chain of length n.
std::vector<MonotoneFunction> monotone_family(std::size_t n);

/// Exact Cov(f, g2) under the chain measure.
double check_positive_association(const GibbsParams& g, double beta_eff, const MonotoneFunction& f,
                                  const MonotoneFunction& g2);

/// All pairwise covariances of a function family, from a single enumeration.
std::vector<double> association_matrix(const GibbsParams& g, double beta_eff,
                                       std::span<const MonotoneFunction> family);

struct NewmanWrightGap {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// |phi(r) - prod_j phi_j(r_j)| and (1/2) sum_{j != k} |r_j r_k| Cov(s_j, s_k).
NewmanWrightGap newman_wright_gap(const GibbsParams& g, double beta_eff, std::span<const double> r);

}  // namespace polyscale
