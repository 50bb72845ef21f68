#include "polyscale/autocorrelation.hpp"

#include <vector>

#include "polyscale/model.hpp"
#include "polyscale/stats.hpp"

namespace polyscale {

double autocorrelation_time(std::span<const double> trace, double window_factor) {
  const std::size_t n = trace.size();
  if (n < 100) throw ValidationError("autocorrelation trace must have at least 100 entries");
  const double m = mean(trace);
  std::vector<double> x(n);
  double c0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = trace[i] - m;
    c0 += x[i] * x[i];
  }
  c0 /= static_cast<double>(n);
  const double scale = std::max(1.0, std::abs(m));
  if (c0 <= 1e-24 * scale * scale) throw DegenerateTraceError("trace has zero variance");
  double tau = 0.5;
  for (std::size_t k = 1; k < n / 2; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += x[i] * x[i + k];
    ck /= static_cast<double>(n);
    tau += ck / c0;
    if (static_cast<double>(k) >= window_factor * tau) break;
  }
  return tau;
}

}  // namespace polyscale
