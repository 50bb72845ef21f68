#pragma once

#include <span>
#include <stdexcept>

namespace polyscale {

class DegenerateTraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrated autocorrelation time tau_int = 1/2 + sum_{k=1}^{W} rho_k with
/// Sokal's self-consistent window: the smallest W with W >= window_factor * tau(W).
/// Throws ValidationError for traces shorter than 100 and DegenerateTraceError
/// for zero-variance traces.
double autocorrelation_time(std::span<const double> trace, double window_factor = 5.0);

}  // namespace polyscale
