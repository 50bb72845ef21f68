#include "polyscale/transport.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace polyscale {

std::vector<TransportEntry> solve_transport(std::span<const double> a, std::span<const double> b,
                                            std::span<const double> c) {
  const std::size_t n = a.size(), m = b.size();
  if (c.size() != n * m) throw std::invalid_argument("cost matrix must be a.size() x b.size()");
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double eps = 1e-13;

  // nodes: rows [0, n), columns [n, n + m), sink T, source S
  const std::size_t T = n + m, S = n + m + 1, V = n + m + 2;
  std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end());
  std::vector<double> flow(n * m, 0.0), pi(V, 0.0), dist(V);
  std::vector<std::size_t> prev(V);
  std::vector<char> done(V);

  auto remaining = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x;
    return s;
  };

  while (remaining(ra) > eps && remaining(rb) > eps) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    for (;;) {
      std::size_t x = V;
      double best = inf;
      for (std::size_t y = 0; y < V; ++y)
        if (!done[y] && dist[y] < best) {
          best = dist[y];
          x = y;
        }
      if (x == V || x == T) break;
      done[x] = 1;
      auto relax = [&](std::size_t y, double w) {
        const double nd = dist[x] + w;
        if (!done[y] && nd < dist[y]) {
          dist[y] = nd;
          prev[y] = x;
        }
      };
      if (x == S) {
        for (std::size_t i = 0; i < n; ++i)
          if (ra[i] > eps) relax(i, pi[S] - pi[i]);
      } else if (x < n) {
        const double* row = c.data() + x * m;
        for (std::size_t j = 0; j < m; ++j) relax(n + j, row[j] + pi[x] - pi[n + j]);
      } else {
        const std::size_t j = x - n;
        if (rb[j] > eps) relax(T, pi[x] - pi[T]);
        for (std::size_t i = 0; i < n; ++i)
          if (flow[i * m + j] > eps) relax(i, -c[i * m + j] + pi[x] - pi[i]);
      }
    }
    if (dist[T] == inf) break;
    for (std::size_t y = 0; y < V; ++y) pi[y] += std::min(dist[y], dist[T]);

    double delta = inf;
    std::size_t y = T;
    while (y != S) {
      const std::size_t x = prev[y];
      if (x == S)
        delta = std::min(delta, ra[y]);
      else if (y == T)
        delta = std::min(delta, rb[x - n]);
      else if (x >= n)
        delta = std::min(delta, flow[y * m + (x - n)]);
      y = x;
    }
    y = T;
    while (y != S) {
      const std::size_t x = prev[y];
      if (x == S) {
        ra[y] -= delta;
        if (ra[y] <= eps) ra[y] = 0.0;
      } else if (y == T) {
        rb[x - n] -= delta;
        if (rb[x - n] <= eps) rb[x - n] = 0.0;
      } else if (x < n) {
        flow[x * m + (y - n)] += delta;
      } else {
        double& f = flow[y * m + (x - n)];
        f -= delta;
        if (f <= eps) f = 0.0;
      }
      y = x;
    }
  }

  std::vector<TransportEntry> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (flow[i * m + j] > 0.0) out.push_back({i, j, flow[i * m + j]});
  return out;
}

}  // namespace polyscale
