#include "polyscale/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "polyscale/autocorrelation.hpp"
#include "polyscale/kernels.hpp"

namespace polyscale {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "metropolis_single_flip" || name == "metropolis") return Algorithm::MetropolisSingleFlip;
  if (name == "heatbath") return Algorithm::Heatbath;
  if (name == "cluster_long_range" || name == "cluster") return Algorithm::ClusterLongRange;
  throw ValidationError("unknown sampler algorithm: " + name);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::MetropolisSingleFlip: return "metropolis_single_flip";
    case Algorithm::Heatbath: return "heatbath";
    case Algorithm::ClusterLongRange: return "cluster_long_range";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (burn_in_sweeps < 0) throw ValidationError("burn_in_sweeps must be >= 0");
  if (thinning_sweeps < 1) throw ValidationError("thinning_sweeps must be >= 1");
  if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (replicas < 1) throw ValidationError("replicas must be >= 1");
  if (auto_thinning && pilot_sweeps < 100) throw ValidationError("pilot_sweeps must be >= 100");
}

std::vector<Polymer> SampleBatch::polymers() const {
  std::vector<Polymer> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(spins_to_polymer(c));
  return out;
}

std::uint64_t chain_seed(std::uint64_t master, std::size_t replica, int chain) {
  return derive_seed(master, {static_cast<std::uint64_t>(replica), static_cast<std::uint64_t>(chain)});
}

// ---------------------------------------------------------------------------
// FFT energy

namespace {
std::mutex g_fftw_plan_mutex;
constexpr std::size_t kDirectEnergyMax = 256;
}  // namespace

struct EnergyConvolver {
  std::size_t n = 0, len = 0;
  double* in = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<std::complex<double>> kernel_spec;
  fftw_plan fwd = nullptr, bwd = nullptr;

  EnergyConvolver(const KernelTable& t, std::size_t n_) : n(n_) {
    len = 1;
    while (len < 2 * n) len <<= 1;
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    in = fftw_alloc_real(len);
    spec = fftw_alloc_complex(len / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), in, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec, in, FFTW_ESTIMATE);
    // Symmetric kernel V(|r|) laid out circularly.
    std::fill(in, in + len, 0.0);
    for (std::size_t r = 1; r < n; ++r) {
      in[r] = t[r];
      in[len - r] = t[r];
    }
    fftw_execute(fwd);
    kernel_spec.resize(len / 2 + 1);
    for (std::size_t k = 0; k <= len / 2; ++k) kernel_spec[k] = {spec[k][0], spec[k][1]};
  }
  ~EnergyConvolver() {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(in);
    fftw_free(spec);
  }

  double energy(std::span<const std::int8_t> s) {
    std::fill(in, in + len, 0.0);
    for (std::size_t i = 0; i < n; ++i) in[i] = s[i];
    fftw_execute(fwd);
    for (std::size_t k = 0; k <= len / 2; ++k) {
      const std::complex<double> z = std::complex<double>(spec[k][0], spec[k][1]) * kernel_spec[k];
      spec[k][0] = z.real();
      spec[k][1] = z.imag();
    }
    fftw_execute(bwd);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += s[i] * in[i];
    return 0.5 * e / static_cast<double>(len);
  }
};

double chain_energy_fast(std::span<const std::int8_t> chain, const KernelTable& t) {
  if (chain.size() <= kDirectEnergyMax) return chain_energy(chain, t);
  EnergyConvolver conv(t, chain.size());
  return conv.energy(chain);
}

// ---------------------------------------------------------------------------
// ChainSampler

ChainSampler::ChainSampler(std::shared_ptr<const KernelTable> table, std::size_t n, double beta_eff,
                           Algorithm algo, std::uint64_t seed)
    : table_(std::move(table)), beta_eff_(beta_eff), algo_(algo), rng_(seed), spins_(n) {
  if (n < 1) throw ValidationError("chain length must be >= 1");
  if (!table_ || table_->size() < n) throw ValidationError("kernel table shorter than chain");
  if (!std::isfinite(beta_eff)) throw ValidationError("beta_eff must be finite");
  if (algo == Algorithm::ClusterLongRange && beta_eff < 0.0)
    throw ValidationError("cluster_long_range requires ferromagnetic couplings (beta_eff >= 0)");
  for (auto& s : spins_) s = rng_.coin() ? 1 : -1;
}

ChainSampler::~ChainSampler() = default;
ChainSampler::ChainSampler(ChainSampler&&) noexcept = default;
ChainSampler& ChainSampler::operator=(ChainSampler&&) noexcept = default;

void ChainSampler::set_spins(SpinChain s) {
  if (s.size() != spins_.size()) throw ValidationError("state length mismatch");
  validate_chain(s);
  spins_ = std::move(s);
  fields_valid_ = false;
  energy_valid_ = false;
}

void ChainSampler::init_fields() {
  const std::size_t n = spins_.size();
  const auto& v = table_->values();
  field_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < i; ++j) h += v[i - j] * spins_[j];
    for (std::size_t j = i + 1; j < n; ++j) h += v[j - i] * spins_[j];
    field_[i] = h;
  }
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += spins_[i] * field_[i];
  energy_ = 0.5 * e;
  energy_valid_ = true;
  fields_valid_ = true;
}

double ChainSampler::energy() {
  if (energy_valid_) return energy_;
  if (algo_ != Algorithm::ClusterLongRange) {
    init_fields();
    return energy_;
  }
  if (spins_.size() <= kDirectEnergyMax) {
    energy_ = chain_energy(spins_, *table_);
  } else {
    if (!conv_) conv_ = std::make_unique<EnergyConvolver>(*table_, spins_.size());
    energy_ = conv_->energy(spins_);
  }
  energy_valid_ = true;
  return energy_;
}

void ChainSampler::sweep() {
  if (algo_ == Algorithm::ClusterLongRange)
    cluster_sweep();
  else
    local_sweep(algo_ == Algorithm::Heatbath);
}

void ChainSampler::local_sweep(bool heatbath) {
  if (!fields_valid_) init_fields();
  const std::size_t n = spins_.size();
  const auto& v = table_->values();
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int s = spins_[i];
    // change in log-weight when flipping site i
    const double delta = -2.0 * beta_eff_ * s * field_[i];
    bool flip;
    if (heatbath) {
      // P(s_i = +1) = 1 / (1 + exp(-2 beta h_i))
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * beta_eff_ * field_[i]));
      const int target = rng_.uniform() < p_plus ? 1 : -1;
      flip = target != s;
    } else {
      flip = delta >= 0.0 || rng_.uniform() < std::exp(delta);
    }
    if (!flip) continue;
    ++accepted;
    energy_ += -2.0 * s * field_[i];
    spins_[i] = static_cast<std::int8_t>(-s);
    const double d = -2.0 * s;
    for (std::size_t j = 0; j < i; ++j) field_[j] += d * v[i - j];
    for (std::size_t j = i + 1; j < n; ++j) field_[j] += d * v[j - i];
  }
  last_acceptance_ = static_cast<double>(accepted) / static_cast<double>(n);
}

std::size_t ChainSampler::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

// Swendsen-Wang update. For site i, candidate bonds (i, i+r) arrive as a
// Poisson process of rate 2 beta_eff in cumulative-coupling coordinates, so
// bond r is proposed with probability 1 - exp(-2 beta_eff V(r)). Each arrival
// is located on the prefix-sum table by binary search.
void ChainSampler::cluster_sweep() {
  const std::size_t n = spins_.size();
  const auto& cum = table_->cumulative();
  parent_.resize(n);
  std::iota(parent_.begin(), parent_.end(), 0u);
  const double rate = 2.0 * beta_eff_;
  if (rate > 0.0) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t rmax = n - 1 - i;
      const double total = cum[rmax];
      double x = 0.0;
      std::size_t pos = 1;
      for (;;) {
        x += rng_.exponential() / rate;
        if (x > total) break;
        const auto it = std::lower_bound(cum.begin() + static_cast<std::ptrdiff_t>(pos),
                                         cum.begin() + static_cast<std::ptrdiff_t>(rmax) + 1, x);
        const std::size_t r = static_cast<std::size_t>(it - cum.begin());
        if (r > rmax) break;
        pos = r;
        const std::size_t j = i + r;
        if (spins_[i] != spins_[j]) continue;
        std::size_t a = find(i), b = find(j);
        if (a == b) continue;
        if (a < b)
          parent_[b] = static_cast<std::uint32_t>(a);
        else
          parent_[a] = static_cast<std::uint32_t>(b);
      }
    }
  }
  flip_.assign(n, 0);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (flip_[root] == 0) flip_[root] = rng_.coin() ? 1 : -1;
    if (flip_[root] < 0) {
      spins_[i] = static_cast<std::int8_t>(-spins_[i]);
      ++flipped;
    }
  }
  last_acceptance_ = static_cast<double>(flipped) / static_cast<double>(n);
  energy_valid_ = false;
  fields_valid_ = false;
}

double metropolis_acceptance(std::span<const std::int8_t> state, std::size_t i, double beta_eff,
                             const KernelTable& t) {
  double h = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j)
    if (j != i) h += t[j > i ? j - i : i - j] * state[j];
  const double delta = -2.0 * beta_eff * state[i] * h;
  return std::min(1.0, std::exp(delta));
}

// ---------------------------------------------------------------------------
// Batches

namespace {

void check_algorithm(const GibbsParams& g, const SamplerConfig& c) {
  if (c.algorithm == Algorithm::ClusterLongRange) {
    if (g.kernel.kind() == InteractionKernel::Kind::Custom && !g.kernel.monotone_nonincreasing())
      throw ValidationError("cluster_long_range requires a monotone kernel tail");
    if (g.chain_beta() < 0.0)
      throw ValidationError("cluster_long_range requires the alignment-favoring sign convention");
  }
}

}  // namespace

int pilot_thinning(const GibbsParams& g, const SamplerConfig& c, double* tau_out) {
  auto table = std::make_shared<const KernelTable>(g.kernel, g.n);
  ChainSampler s(table, g.n, g.chain_beta(), c.algorithm, derive_seed(c.seed, {0x70696c6f74ULL}));
  s.sweeps(c.burn_in_sweeps);
  std::vector<double> trace(static_cast<std::size_t>(c.pilot_sweeps));
  for (auto& e : trace) {
    s.sweep();
    e = s.energy();
  }
  double tau = 0.5;
  try {
    tau = autocorrelation_time(trace);
  } catch (const DegenerateTraceError&) {
    tau = 0.5;
  }
  if (tau_out) *tau_out = tau;
  return std::max(1, static_cast<int>(std::lround(2.0 * tau)));
}

SampleBatch sample_chain(const GibbsParams& g, const SamplerConfig& cfg) {
  g.validate();
  cfg.validate();
  if (g.n < 2) throw ValidationError("sample_chain needs N >= 2");
  check_algorithm(g, cfg);
  SamplerConfig c = cfg;
  SampleBatch batch;
  if (c.auto_thinning) {
    double tau = 0;
    c.thinning_sweeps = pilot_thinning(g, c, &tau);
  }
  batch.replicas = static_cast<std::size_t>(c.replicas);
  batch.n_samples = static_cast<std::size_t>(c.n_samples);
  batch.thinning_sweeps = c.thinning_sweeps;
  batch.configs.resize(batch.replicas * batch.n_samples);
  batch.meta.resize(batch.replicas);
  auto table = std::make_shared<const KernelTable>(g.kernel, g.n);
  const double beta_eff = g.chain_beta();

  kernels::for_each_replica_parallel(batch.replicas, [&](std::size_t r) {
    ReplicaMeta& meta = batch.meta[r];
    meta.replica = r;
    meta.seeds = {chain_seed(c.seed, r, 0), chain_seed(c.seed, r, 1)};
    ChainSampler a(table, g.n, beta_eff, c.algorithm, meta.seeds[0]);
    ChainSampler b(table, g.n, beta_eff, c.algorithm, meta.seeds[1]);
    a.sweeps(c.burn_in_sweeps);
    b.sweeps(c.burn_in_sweeps);
    const std::size_t measured = batch.n_samples * static_cast<std::size_t>(c.thinning_sweeps);
    meta.acceptance.reserve(measured);
    meta.energy.reserve(measured);
    for (std::size_t s = 0; s < batch.n_samples; ++s) {
      for (int t = 0; t < c.thinning_sweeps; ++t) {
        a.sweep();
        b.sweep();
        meta.acceptance.push_back(0.5 * (a.last_acceptance() + b.last_acceptance()));
        meta.energy.push_back(0.5 * (a.energy() + b.energy()));
      }
      batch.configs[r * batch.n_samples + s] = SpinChainPair(a.spins(), b.spins());
    }
  });

  if (!batch.meta.empty() && batch.meta[0].energy.size() >= 100) {
    try {
      const double tau = autocorrelation_time(batch.meta[0].energy);
      if (2.0 * tau > c.thinning_sweeps)
        batch.warnings.push_back("thinning_sweeps below 2 tau_int of the energy trace (tau_int=" +
                                 std::to_string(tau) + ")");
    } catch (const DegenerateTraceError&) {
    }
  }
  return batch;
}

SampleBatch sample_polymer_direct(const GibbsParams& g, const SamplerConfig& cfg) {
  g.validate();
  cfg.validate();
  SampleBatch batch;
  batch.replicas = static_cast<std::size_t>(cfg.replicas);
  batch.n_samples = static_cast<std::size_t>(cfg.n_samples);
  batch.thinning_sweeps = cfg.thinning_sweeps;
  batch.configs.resize(batch.replicas * batch.n_samples);
  batch.meta.resize(batch.replicas);
  const KernelTable table(g.kernel, g.n);
  const double coupling = g.kernel.sign() * g.beta;
  const std::size_t n = g.n;

  kernels::for_each_replica_parallel(batch.replicas, [&](std::size_t r) {
    ReplicaMeta& meta = batch.meta[r];
    meta.replica = r;
    const std::uint64_t seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), 0x706f6c79ULL});
    meta.seeds = {seed, 0};
    Rng rng(seed);
    std::vector<Step> steps(n);
    for (auto& s : steps) s = static_cast<Step>(rng.below(4));
    // field[i] = sum_{j != i} V(|i-j|) X_j
    std::vector<Vec2> field(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto x = step_vector(steps[j]);
        const double v = table[i > j ? i - j : j - i];
        field[i][0] += v * x[0];
        field[i][1] += v * x[1];
      }
    double h = hamiltonian(Polymer(steps), table);
    std::size_t accepted = 0;
    auto sweep = [&] {
      accepted = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Step proposal = static_cast<Step>(rng.below(4));
        const auto xo = step_vector(steps[i]);
        const auto xn = step_vector(proposal);
        const double dx = xn[0] - xo[0], dy = xn[1] - xo[1];
        const double dh = dx * field[i][0] + dy * field[i][1];
        const double delta = coupling * dh;
        if (!(delta >= 0.0 || rng.uniform() < std::exp(delta))) continue;
        ++accepted;
        steps[i] = proposal;
        h += dh;
        if (dx == 0.0 && dy == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const double v = table[i > j ? i - j : j - i];
          field[j][0] += v * dx;
          field[j][1] += v * dy;
        }
      }
    };
    for (int b = 0; b < cfg.burn_in_sweeps; ++b) sweep();
    for (std::size_t s = 0; s < batch.n_samples; ++s) {
      for (int t = 0; t < cfg.thinning_sweeps; ++t) {
        sweep();
        meta.acceptance.push_back(static_cast<double>(accepted) / static_cast<double>(n));
        meta.energy.push_back(h);
      }
      batch.configs[r * batch.n_samples + s] = polymer_to_spins(Polymer(steps));
    }
  });
  return batch;
}

}  // namespace polyscale
