#include "polyscale/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace polyscale {

namespace {

double matched_cost(std::span<const double> cost, std::size_t n, const std::vector<std::size_t>& r2c) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += cost[i * n + r2c[i]];
  return s;
}

}  // namespace

AssignmentResult solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("cost matrix must be n x n");
  AssignmentResult res;
  if (n == 0) return res;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based: column 0 is the virtual start of each augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      const double* row = cost.data() + (i0 - 1) * n;
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  res.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) res.row_to_col[match[j] - 1] = j - 1;
  res.cost = matched_cost(cost, n, res.row_to_col);
  return res;
}

AssignmentResult brute_force_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("cost matrix must be n x n");
  if (n > 10) throw std::invalid_argument("brute force limited to n <= 10");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  AssignmentResult best;
  best.row_to_col = perm;
  best.cost = matched_cost(cost, n, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = matched_cost(cost, n, perm);
    if (c < best.cost) {
      best.cost = c;
      best.row_to_col = perm;
    }
  }
  return best;
}

}  // namespace polyscale
