#pragma once

// Wasserstein distances between finitely supported measures on R and R^2.

#include <cstddef>
#include <span>
#include <vector>

#include "polyscale/kernels.hpp"
#include "polyscale/model.hpp"

namespace polyscale {

class CapExceededError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InfeasibleWeightsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

constexpr double kWeightTolerance = 1e-9;
constexpr std::size_t kDefaultAtomCap = 4096;

struct EmpiricalMeasure {
  int dim = 1;
  /// Row-major atoms, size() * dim entries.
  std::vector<double> coords;
  std::vector<double> weights;

  EmpiricalMeasure() = default;
  /// Uniform weights.
  EmpiricalMeasure(int dim, std::vector<double> coords);
  EmpiricalMeasure(int dim, std::vector<double> coords, std::vector<double> weights);

  std::size_t size() const { return weights.size(); }
  std::span<const double> atom(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  bool uniform() const;
  /// Throws ValidationError on bad shape or negative weights,
  /// InfeasibleWeightsError when the weights do not sum to 1.
  void validate() const;
  /// Copy with every coordinate scaled by a.
  EmpiricalMeasure scaled(double a) const;
  /// 1D measure placed on the first axis of R^2.
  EmpiricalMeasure embedded_2d() const;
};

struct CouplingPlan {
  struct Entry {
    std::size_t i;
    std::size_t j;
    double mass;
  };
  std::vector<Entry> entries;
  /// sum of mass * ||x_i - y_j||^p
  double cost = 0.0;
};

struct TransportResult {
  double distance = 0.0;
  CouplingPlan plan;
};

struct TransportOptions {
  kernels::GroundNorm norm = kernels::GroundNorm::Euclidean;
  std::size_t atom_cap = kDefaultAtomCap;
};

/// Sorted-quantile coupling; returns (int_0^1 |F^-1 - G^-1|^p du)^{1/p}.
/// This is the optimal transport value only for p >= 1.
double d_p_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);
/// The p-cost int |F^-1 - G^-1|^p du of the quantile coupling.
double cost_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Exact optimal transport between two finite measures of the same dimension.
/// Uniform equal-size inputs use the assignment solver, others min-cost flow.
TransportResult d_p_exact_2d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                             const TransportOptions& opt = {});

/// Largest marginal violation of a plan against the two weight vectors.
double plan_marginal_error(const CouplingPlan& plan, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

void check_order(double p);

}  // namespace polyscale
