#include "polyscale/model.hpp"

#include <cmath>
#include <sstream>

namespace polyscale {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

Vec2 rotate(const Vec2& v) { return {(v[0] - v[1]) * kInvSqrt2, (v[0] + v[1]) * kInvSqrt2}; }

Vec2 rotate_back(const Vec2& v) { return {(v[0] + v[1]) * kInvSqrt2, (v[1] - v[0]) * kInvSqrt2}; }

std::vector<Site> Polymer::sites() const {
  std::vector<Site> out(steps_.size() + 1, Site{0, 0});
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto d = step_vector(steps_[i]);
    out[i + 1] = {out[i][0] + d[0], out[i][1] + d[1]};
  }
  return out;
}

Site Polymer::end_point() const {
  Site s{0, 0};
  for (Step st : steps_) {
    const auto d = step_vector(st);
    s[0] += d[0];
    s[1] += d[1];
  }
  return s;
}

void validate_chain(std::span<const std::int8_t> chain) {
  for (auto s : chain)
    if (s != 1 && s != -1) throw ValidationError("spin entries must be +1 or -1");
}

SpinChainPair::SpinChainPair(SpinChain s1, SpinChain s2) : sigma1(std::move(s1)), sigma2(std::move(s2)) {
  if (sigma1.size() != sigma2.size()) throw ValidationError("spin chains have different lengths");
  validate_chain(sigma1);
  validate_chain(sigma2);
}

InteractionKernel InteractionKernel::power_law(double alpha, SignConvention sign) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw ValidationError("power-law kernel needs alpha > 1");
  InteractionKernel k;
  k.kind_ = Kind::PowerLaw;
  k.alpha_ = alpha;
  k.sign_ = sign;
  return k;
}

InteractionKernel InteractionKernel::finite_range(int range, double strength, SignConvention sign) {
  if (range < 1) throw ValidationError("finite-range kernel needs range >= 1");
  if (!(strength > 0.0) || !std::isfinite(strength))
    throw ValidationError("finite-range kernel needs strength > 0");
  InteractionKernel k;
  k.kind_ = Kind::FiniteRange;
  k.range_ = range;
  k.strength_ = strength;
  k.sign_ = sign;
  return k;
}

InteractionKernel InteractionKernel::custom(std::vector<double> table, SignConvention sign) {
  for (double v : table)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("custom kernel entries must be finite and nonnegative");
  InteractionKernel k;
  k.kind_ = Kind::Custom;
  k.table_ = std::move(table);
  k.sign_ = sign;
  // Heuristic: flag tables whose tail decays slower than 1/r.
  const std::size_t n = k.table_.size();
  if (n >= 16) {
    const double head = k.table_[n / 2 - 1] * static_cast<double>(n / 2);
    const double tail = k.table_[n - 1] * static_cast<double>(n);
    if (tail > 0.0 && tail >= head) k.summability_warning_ = true;
  }
  return k;
}

double InteractionKernel::operator()(std::int64_t r) const {
  if (r <= 0) return 0.0;
  switch (kind_) {
    case Kind::PowerLaw: return std::pow(static_cast<double>(r), -alpha_);
    case Kind::FiniteRange: return r <= range_ ? strength_ : 0.0;
    case Kind::Custom:
      return static_cast<std::size_t>(r) <= table_.size() ? table_[static_cast<std::size_t>(r - 1)] : 0.0;
  }
  return 0.0;
}

bool InteractionKernel::monotone_nonincreasing() const {
  if (kind_ != Kind::Custom) return true;
  for (std::size_t i = 1; i < table_.size(); ++i)
    if (table_[i] > table_[i - 1]) return false;
  return true;
}

std::string InteractionKernel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::PowerLaw: os << "power_law(alpha=" << alpha_ << ")"; break;
    case Kind::FiniteRange: os << "finite_range(L=" << range_ << ", V=" << strength_ << ")"; break;
    case Kind::Custom: os << "custom(" << table_.size() << " entries)"; break;
  }
  os << (sign_ == SignConvention::AlignmentFavoring ? " alignment_favoring" : " as_written");
  return os.str();
}

KernelTable::KernelTable(const InteractionKernel& k, std::size_t n) : v_(n, 0.0), cum_(n, 0.0) {
  for (std::size_t r = 1; r < n; ++r) {
    v_[r] = k(static_cast<std::int64_t>(r));
    cum_[r] = cum_[r - 1] + v_[r];
  }
}

void GibbsParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and >= 0");
  if (n < 1) throw ValidationError("N must be >= 1");
}

double hamiltonian(const Polymer& p, const KernelTable& t) {
  if (p.empty()) throw ValidationError("empty polymer");
  const auto& st = p.steps();
  const std::size_t n = st.size();
  if (t.size() < n) throw ValidationError("kernel table shorter than polymer");
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = step_vector(st[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = step_vector(st[j]);
      const int dot = u[0] * v[0] + u[1] * v[1];
      if (dot != 0) h += t[j - i] * dot;
    }
  }
  return h;
}

double hamiltonian(const Polymer& p, const InteractionKernel& k) {
  return hamiltonian(p, KernelTable(k, p.size()));
}

SpinChainPair polymer_to_spins(const Polymer& p) {
  SpinChainPair out;
  out.sigma1.resize(p.size());
  out.sigma2.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::int8_t a = 1, b = 1;
    switch (p[i]) {
      case Step::PlusE1: a = 1; b = 1; break;
      case Step::PlusE2: a = -1; b = 1; break;
      case Step::MinusE1: a = -1; b = -1; break;
      case Step::MinusE2: a = 1; b = -1; break;
    }
    out.sigma1[i] = a;
    out.sigma2[i] = b;
  }
  return out;
}

Polymer spins_to_polymer(const SpinChainPair& s) {
  if (s.sigma1.size() != s.sigma2.size()) throw ValidationError("spin chains have different lengths");
  std::vector<Step> steps(s.sigma1.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int a = s.sigma1[i], b = s.sigma2[i];
    if ((a != 1 && a != -1) || (b != 1 && b != -1)) throw ValidationError("spin entries must be +1 or -1");
    // X = ((a + b) / 2, (b - a) / 2)
    if (a == 1 && b == 1) steps[i] = Step::PlusE1;
    else if (a == -1 && b == 1) steps[i] = Step::PlusE2;
    else if (a == -1 && b == -1) steps[i] = Step::MinusE1;
    else steps[i] = Step::MinusE2;
  }
  return Polymer(std::move(steps));
}

double gibbs_log_weight(const Polymer& p, const GibbsParams& g) {
  if (g.beta == 0.0) return 0.0;
  return g.kernel.sign() * g.beta * hamiltonian(p, g.kernel);
}

double chain_energy(std::span<const std::int8_t> chain, const KernelTable& t) {
  const std::size_t n = chain.size();
  if (t.size() < n) throw ValidationError("kernel table shorter than chain");
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row += t[j - i] * chain[j];
    e += chain[i] * row;
  }
  return e;
}

double chain_log_weight(std::span<const std::int8_t> chain, double beta_eff, const InteractionKernel& k) {
  validate_chain(chain);
  if (beta_eff == 0.0) return 0.0;
  return beta_eff * chain_energy(chain, KernelTable(k, chain.size()));
}

}  // namespace polyscale
