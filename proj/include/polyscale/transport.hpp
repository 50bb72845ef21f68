#pragma once

#include <span>
#include <vector>

namespace polyscale {

struct TransportEntry {
  std::size_t i;
  std::size_t j;
  double mass;
};

/// Balanced transportation problem: supplies a, demands b, dense row-major
/// costs c (a.size() x b.size(), c >= 0). Successive shortest paths with
/// node potentials; each augmentation saturates a supply, a demand or a
/// reverse arc.
std::vector<TransportEntry> solve_transport(std::span<const double> a, std::span<const double> b,
                                            std::span<const double> c);

}  // namespace polyscale
