#pragma once

// MCMC samplers for the factor chains and, as a cross-check, for the polymer
// measure directly.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "polyscale/model.hpp"
#include "polyscale/rng.hpp"

namespace polyscale {

struct EnergyConvolver;

enum class Algorithm { MetropolisSingleFlip, Heatbath, ClusterLongRange };

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm a);

struct SamplerConfig {
  std::uint64_t seed = 0;
  int burn_in_sweeps = 100;
  int thinning_sweeps = 1;
  int n_samples = 1;
  Algorithm algorithm = Algorithm::MetropolisSingleFlip;
  int replicas = 1;
  /// Replace thinning_sweeps by max(1, round(2 tau_int)) from a pilot run.
  bool auto_thinning = false;
  int pilot_sweeps = 1000;

  void validate() const;
};

struct ReplicaMeta {
  std::size_t replica = 0;
  std::array<std::uint64_t, 2> seeds{};
  /// Per measured sweep, averaged over both chains: accepted flips / N for
  /// local updates, flipped sites / N for cluster updates.
  std::vector<double> acceptance;
  /// Polymer Hamiltonian H = (E1 + E2) / 2 after each measured sweep.
  std::vector<double> energy;
};

struct SampleBatch {
  std::size_t replicas = 0;
  std::size_t n_samples = 0;
  int thinning_sweeps = 1;
  /// index = replica * n_samples + sample
  std::vector<SpinChainPair> configs;
  std::vector<ReplicaMeta> meta;
  std::vector<std::string> warnings;

  std::vector<Polymer> polymers() const;
};

/// Stream seeds used by replica r: chain c uses derive_seed(seed, {r, c}).
std::uint64_t chain_seed(std::uint64_t master, std::size_t replica, int chain);

/// Single long-range Ising chain with weight exp(beta_eff sum_{i<j} V s_i s_j).
class ChainSampler {
 public:
  ChainSampler(std::shared_ptr<const KernelTable> table, std::size_t n, double beta_eff, Algorithm algo,
               std::uint64_t seed);
  ~ChainSampler();
  ChainSampler(ChainSampler&&) noexcept;
  ChainSampler& operator=(ChainSampler&&) noexcept;

  /// N sequential single-site updates, or one Swendsen-Wang cluster update.
  void sweep();
  void sweeps(int count) {
    for (int i = 0; i < count; ++i) sweep();
  }

  const SpinChain& spins() const { return spins_; }
  void set_spins(SpinChain s);
  std::size_t size() const { return spins_.size(); }
  double beta_eff() const { return beta_eff_; }
  Algorithm algorithm() const { return algo_; }

  /// sum_{i<j} V(|i-j|) s_i s_j of the current state.
  double energy();
  double last_acceptance() const { return last_acceptance_; }

 private:
  void local_sweep(bool heatbath);
  void cluster_sweep();
  void init_fields();
  std::size_t find(std::size_t x);

  std::shared_ptr<const KernelTable> table_;
  double beta_eff_;
  Algorithm algo_;
  Rng rng_;
  SpinChain spins_;
  std::vector<double> field_;
  bool fields_valid_ = false;
  double energy_ = 0.0;
  bool energy_valid_ = false;
  double last_acceptance_ = 0.0;
  std::vector<std::uint32_t> parent_;
  std::vector<std::int8_t> flip_;
  std::unique_ptr<EnergyConvolver> conv_;
};

/// Exact chain energy via FFT convolution for long chains, direct sum for short ones.
double chain_energy_fast(std::span<const std::int8_t> chain, const KernelTable& t);

/// Samples polymers by running two independent chains at beta_eff = sign*beta/2
/// per replica and pairing their states through spins_to_polymer.
SampleBatch sample_chain(const GibbsParams& g, const SamplerConfig& c);

/// Metropolis directly on step sequences; proposal redraws one step uniformly.
SampleBatch sample_polymer_direct(const GibbsParams& g, const SamplerConfig& c);

/// Thinning chosen from a pilot run on the energy trace.
int pilot_thinning(const GibbsParams& g, const SamplerConfig& c, double* tau_out = nullptr);

/// Metropolis acceptance probability of flipping site i of `state`.
double metropolis_acceptance(std::span<const std::int8_t> state, std::size_t i, double beta_eff,
                             const KernelTable& t);

}  // namespace polyscale
