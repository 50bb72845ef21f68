#pragma once

#include <span>
#include <vector>

namespace polyscale {

struct AssignmentResult {
  /// row i is matched to column row_to_col[i]
  std::vector<std::size_t> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a dense n x n row-major cost matrix by
/// shortest augmenting paths with dual potentials. Ties go to the lowest
/// column index.
AssignmentResult solve_assignment(std::span<const double> cost, std::size_t n);

/// Exhaustive search over all n! permutations, n <= 10.
AssignmentResult brute_force_assignment(std::span<const double> cost, std::size_t n);

}  // namespace polyscale
