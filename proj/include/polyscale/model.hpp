#pragma once

// Polymer and spin-chain configurations, interaction kernels and the
// long-range Hamiltonian.
//
// A polymer is a nearest-neighbour path on Z^2 starting at the origin. Each
// step X_i is rotated by pi/4 and rescaled so that it becomes a pair of signs
// (sigma1_i, sigma2_i); this turns the polymer measure into a product of two
// one-dimensional long-range Ising chains.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyscale {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Step : std::uint8_t { PlusE1 = 0, MinusE1 = 1, PlusE2 = 2, MinusE2 = 3 };

using Site = std::array<std::int64_t, 2>;
using Vec2 = std::array<double, 2>;
using SpinChain = std::vector<std::int8_t>;

inline std::array<int, 2> step_vector(Step s) {
  switch (s) {
    case Step::PlusE1: return {1, 0};
    case Step::MinusE1: return {-1, 0};
    case Step::PlusE2: return {0, 1};
    case Step::MinusE2: return {0, -1};
  }
  return {0, 0};
}

inline int inner(Step a, Step b) {
  const auto u = step_vector(a);
  const auto v = step_vector(b);
  return u[0] * v[0] + u[1] * v[1];
}

/// Rotation by pi/4: T(x, y) = ((x - y)/sqrt2, (x + y)/sqrt2).
Vec2 rotate(const Vec2& v);
/// Inverse rotation.
Vec2 rotate_back(const Vec2& v);

class Polymer {
 public:
  Polymer() = default;
  explicit Polymer(std::vector<Step> steps) : steps_(std::move(steps)) {}

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const std::vector<Step>& steps() const { return steps_; }
  Step operator[](std::size_t i) const { return steps_[i]; }

  /// Sites S_0 = 0, S_1, ..., S_N.
  std::vector<Site> sites() const;
  Site end_point() const;

  friend bool operator==(const Polymer&, const Polymer&) = default;

 private:
  std::vector<Step> steps_;
};

struct SpinChainPair {
  SpinChain sigma1;
  SpinChain sigma2;

  SpinChainPair() = default;
  /// Throws ValidationError on unequal lengths or entries other than +-1.
  SpinChainPair(SpinChain s1, SpinChain s2);

  std::size_t size() const { return sigma1.size(); }
  friend bool operator==(const SpinChainPair&, const SpinChainPair&) = default;
};

void validate_chain(std::span<const std::int8_t> chain);

enum class SignConvention { AlignmentFavoring, AsWritten };

class InteractionKernel {
 public:
  enum class Kind { PowerLaw, FiniteRange, Custom };

  /// V(r) = r^{-alpha}, alpha > 1.
  static InteractionKernel power_law(double alpha,
                                     SignConvention sign = SignConvention::AlignmentFavoring);
  /// V(r) = strength for 1 <= r <= range, 0 beyond.
  static InteractionKernel finite_range(int range, double strength,
                                        SignConvention sign = SignConvention::AlignmentFavoring);
  /// table[r - 1] = V(r); V(r) = 0 beyond the table.
  static InteractionKernel custom(std::vector<double> table,
                                  SignConvention sign = SignConvention::AlignmentFavoring);

  double operator()(std::int64_t r) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  int range() const { return range_; }
  double strength() const { return strength_; }
  const std::vector<double>& table() const { return table_; }
  SignConvention sign_convention() const { return sign_; }
  /// +1 for alignment-favouring weights exp(+beta H), -1 for exp(-beta H).
  double sign() const { return sign_ == SignConvention::AlignmentFavoring ? 1.0 : -1.0; }
  bool monotone_nonincreasing() const;
  /// Set for custom tables whose tail does not look summable.
  bool summability_warning() const { return summability_warning_; }

  std::string describe() const;

 private:
  Kind kind_ = Kind::PowerLaw;
  double alpha_ = 2.0;
  int range_ = 0;
  double strength_ = 0.0;
  std::vector<double> table_;
  SignConvention sign_ = SignConvention::AlignmentFavoring;
  bool summability_warning_ = false;
};

/// V(r) for r = 0..n-1 (V(0) = 0) plus prefix sums cum[r] = sum_{s<=r} V(s).
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(const InteractionKernel& k, std::size_t n);

  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t r) const { return v_[r]; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& cumulative() const { return cum_; }

 private:
  std::vector<double> v_;
  std::vector<double> cum_;
};

struct GibbsParams {
  double beta = 0.0;
  InteractionKernel kernel = InteractionKernel::power_law(2.0);
  std::size_t n = 1;

  void validate() const;
  /// Coupling of each factor chain: sign * beta / 2.
  double chain_beta() const { return kernel.sign() * beta / 2.0; }
};

/// sum_{i<j} V(|i-j|) <X_i, X_j>, exact O(N^2).
double hamiltonian(const Polymer& p, const InteractionKernel& k);
double hamiltonian(const Polymer& p, const KernelTable& t);

SpinChainPair polymer_to_spins(const Polymer& p);
Polymer spins_to_polymer(const SpinChainPair& s);

/// sign * beta * H(p).
double gibbs_log_weight(const Polymer& p, const GibbsParams& g);

/// beta_eff * sum_{i<j} V(|i-j|) s_i s_j.
double chain_log_weight(std::span<const std::int8_t> chain, double beta_eff,
                        const InteractionKernel& k);
double chain_energy(std::span<const std::int8_t> chain, const KernelTable& t);

}  // namespace polyscale
