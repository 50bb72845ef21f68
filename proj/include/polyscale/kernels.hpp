#pragma once

// Data-parallel kernels. Each kernel has an OpenMP version and a serial
// reference version; both produce bit-identical results, which the test suite
// checks and the benchmark target compares for speed.

#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "polyscale/model.hpp"

namespace polyscale::kernels {

/// Runs f(r) for r in [0, count). f must only write to replica-indexed slots
/// or merge order-independent (integer) accumulators.
template <class F>
void for_each_replica_parallel(std::size_t count, F&& f) {
  std::exception_ptr err;
  std::mutex m;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(count); ++r) {
    try {
      f(static_cast<std::size_t>(r));
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

template <class F>
void for_each_replica_serial(std::size_t count, F&& f) {
  for (std::size_t r = 0; r < count; ++r) f(r);
}

enum class GroundNorm { Euclidean, L1 };

/// C[i * m + j] = ||a_i - b_j||^p for row-major point arrays of dimension dim.
std::vector<double> cost_matrix_parallel(std::span<const double> a, std::span<const double> b, int dim, double p,
                                         GroundNorm norm);
std::vector<double> cost_matrix_serial(std::span<const double> a, std::span<const double> b, int dim, double p,
                                       GroundNorm norm);

/// energies[s] = sum_{i<j} V(j-i) s_i s_j where bit i of s set means s_i = +1.
std::vector<double> chain_state_energies_parallel(std::size_t n, const KernelTable& t);
std::vector<double> chain_state_energies_serial(std::size_t n, const KernelTable& t);

/// sum_i s_i s_{i+k} for k = 0..kmax over one chain, via bit packing.
void lag_products(std::span<const std::int8_t> chain, std::size_t kmax, std::span<std::int64_t> out);
void lag_products_reference(std::span<const std::int8_t> chain, std::size_t kmax, std::span<std::int64_t> out);

}  // namespace polyscale::kernels
