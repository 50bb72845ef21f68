#include "polyscale/gaussian.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "polyscale/rng.hpp"

namespace polyscale {

ReferenceMode parse_reference_mode(const std::string& s) {
  if (s == "1d") return ReferenceMode::OneD;
  if (s == "2d") return ReferenceMode::TwoD;
  throw ValidationError("mode must be 1d or 2d, got '" + s + "'");
}

namespace {

double zphi(double z) { return std::isfinite(z) ? z * normal_pdf(z) : 0.0; }

/// Phi(b) - Phi(a), evaluated on the tail that keeps precision.
double cdf_diff(double a, double b) {
  if (a >= 0.0) return 0.5 * (std::erfc(a * 0.70710678118654752440) - std::erfc(b * 0.70710678118654752440));
  return normal_cdf(b) - normal_cdf(a);
}

/// int_a^b |x - s z|^p phi(z) dz, with du = Phi(b) - Phi(a) when known.
double cell_cost(double x, double a, double b, double s, double p, double du) {
  if (!(b > a)) return 0.0;
  if (p == 2.0)
    return du * (x * x + s * s) - 2.0 * x * s * (normal_pdf(a) - normal_pdf(b)) - s * s * (zphi(b) - zphi(a));
  const double z0 = x / s;
  if (p == 1.0) {
    double total = 0.0;
    const double c = std::clamp(z0, a, b);
    if (c > a) total += x * cdf_diff(a, c) - s * (normal_pdf(a) - normal_pdf(c));
    if (b > c) total += s * (normal_pdf(c) - normal_pdf(b)) - x * cdf_diff(c, b);
    return std::max(total, 0.0);
  }
  auto f = [&](double z) { return std::pow(std::abs(x - s * z), p) * normal_pdf(z); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  if (z0 > a && z0 < b) {
    total += GK::integrate(f, a, z0, 12, 1e-12);
    total += GK::integrate(f, z0, b, 12, 1e-12);
  } else {
    total += GK::integrate(f, a, b, 12, 1e-12);
  }
  return total;
}

double cost_from_partition(std::span<const double> x, std::span<const double> u, double t, double p) {
  const double s = std::sqrt(t);
  CompensatedSum cost;
  double ua = 0.0;
  double za = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double ub = k + 1 == x.size() ? 1.0 : u[k];
    const double zb = normal_quantile(ub);
    cost += cell_cost(x[k], za, zb, s, p, ub - ua);
    ua = ub;
    za = zb;
  }
  return std::max(cost.value(), 0.0);
}

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("t must be > 0");
}

}  // namespace

double gaussian_cost_sorted(std::span<const double> sorted, double t, double p) {
  check_order(p);
  check_t(t);
  if (sorted.empty()) throw ValidationError("measure has no atoms");
  const double m = static_cast<double>(sorted.size());
  std::vector<double> u(sorted.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = static_cast<double>(k + 1) / m;
  return cost_from_partition(sorted, u, t, p);
}

double gaussian_cost_1d(const EmpiricalMeasure& mu, double t, double p) {
  check_order(p);
  check_t(t);
  mu.validate();
  if (mu.dim != 1) throw ValidationError("gaussian_cost_1d expects a 1D measure");
  std::vector<std::size_t> idx(mu.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mu.coords[a] < mu.coords[b]; });
  std::vector<double> x(idx.size()), u(idx.size());
  CompensatedSum cum;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    x[k] = mu.coords[idx[k]];
    cum += mu.weights[idx[k]];
    u[k] = std::min(cum.value(), 1.0);
  }
  return cost_from_partition(x, u, t, p);
}

EmpiricalMeasure gaussian_reference_sample(double t, std::size_t count, std::uint64_t seed) {
  check_t(t);
  if (count == 0) throw ValidationError("reference sample must be nonempty");
  Rng rng(derive_seed(seed, {0x72656673ULL}));
  const double s = std::sqrt(t);
  std::vector<double> c(2 * count);
  for (auto& v : c) v = s * rng.normal();
  return EmpiricalMeasure(2, std::move(c));
}

EmpiricalMeasure thin_atoms(const EmpiricalMeasure& mu, std::size_t count) {
  if (count == 0) throw ValidationError("thinning to zero atoms");
  if (mu.size() <= count) return mu.uniform() ? mu : EmpiricalMeasure(mu.dim, mu.coords);
  std::vector<double> c;
  c.reserve(count * static_cast<std::size_t>(mu.dim));
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = k * mu.size() / count;
    const auto a = mu.atom(i);
    c.insert(c.end(), a.begin(), a.end());
  }
  return EmpiricalMeasure(mu.dim, std::move(c));
}

namespace {

EmpiricalMeasure drop_group(const EmpiricalMeasure& m, int groups, int g) {
  std::vector<double> c;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (static_cast<int>(i % static_cast<std::size_t>(groups)) != g) {
      const auto a = m.atom(i);
      c.insert(c.end(), a.begin(), a.end());
    }
  return EmpiricalMeasure(m.dim, std::move(c));
}

}  // namespace

DistanceEstimate d_p_to_gaussian(const EmpiricalMeasure& mu, double t, double p, ReferenceMode mode,
                                 std::size_t ref_samples, std::uint64_t seed, int groups) {
  check_order(p);
  check_t(t);
  mu.validate();
  DistanceEstimate out;
  if (mode == ReferenceMode::OneD) {
    if (mu.dim != 1) throw ValidationError("1d mode expects a 1D measure");
    if (groups >= 2 && !mu.uniform()) throw ValidationError("jackknife needs uniform weights");
    const auto e = group_jackknife(groups, [&](int g) {
      const EmpiricalMeasure m = g < 0 ? mu : drop_group(mu, groups, g);
      return std::pow(gaussian_cost_1d(m, t, p), 1.0 / p);
    });
    out.value = e.value;
    out.se = e.se;
    return out;
  }
  if (mu.dim != 2) throw ValidationError("2d mode expects a 2D measure");
  const EmpiricalMeasure ref = gaussian_reference_sample(t, ref_samples, seed);
  const EmpiricalMeasure x = thin_atoms(mu, ref_samples);
  const EmpiricalMeasure y = x.size() == ref.size() ? ref : thin_atoms(ref, x.size());
  TransportOptions opt;
  opt.atom_cap = std::max(kDefaultAtomCap, x.size() + y.size());
  const auto e = group_jackknife(groups, [&](int g) {
    if (g < 0) return d_p_exact_2d(x, y, p, opt).distance;
    return d_p_exact_2d(drop_group(x, groups, g), drop_group(y, groups, g), p, opt).distance;
  });
  out.value = e.value;
  out.se = e.se;
  return out;
}

double gaussian_abs_moment(int dim, double t, double p) {
  check_t(t);
  if (dim == 1) return std::pow(2.0 * t, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(M_PI);
  if (dim == 2) return std::pow(2.0 * t, 0.5 * p) * std::tgamma(1.0 + 0.5 * p);
  throw ValidationError("Gaussian moments available for dim 1 or 2");
}

double abs_moment(const EmpiricalMeasure& mu, double p) {
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double r2 = 0.0;
    for (double v : mu.atom(i)) r2 += v * v;
    s += mu.weights[i] * std::pow(r2, 0.5 * p);
  }
  return s.value();
}

namespace {

int reference_dim(const Reference& ref) {
  return std::visit([](const auto& r) { return r.dim; }, ref);
}

double empirical_cdf_2d(const EmpiricalMeasure& m, double x, double y) {
  CompensatedSum s;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.coords[2 * i] <= x && m.coords[2 * i + 1] <= y) s += m.weights[i];
  return s.value();
}

}  // namespace

double cdf_gap(const EmpiricalMeasure& mu, const Reference& ref) {
  mu.validate();
  if (mu.dim != reference_dim(ref)) throw ValidationError("dimension mismatch with reference");
  const auto* g = std::get_if<GaussianTarget>(&ref);
  const auto* e = std::get_if<EmpiricalMeasure>(&ref);
  if (mu.dim == 1) {
    // Sup over the merged support of |F - G|, checking both one-sided limits.
    std::vector<std::pair<double, double>> pts;  // (x, signed mass: mu +, ref -)
    for (std::size_t i = 0; i < mu.size(); ++i) pts.push_back({mu.coords[i], mu.weights[i]});
    if (e)
      for (std::size_t i = 0; i < e->size(); ++i) pts.push_back({e->coords[i], -e->weights[i]});
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double fmu = 0.0, fref = 0.0, gap = 0.0;
    for (std::size_t k = 0; k < pts.size();) {
      const double x = pts[k].first;
      if (g) gap = std::max(gap, std::abs(fmu - normal_cdf(x / std::sqrt(g->t))));
      for (; k < pts.size() && pts[k].first == x; ++k) {
        if (pts[k].second >= 0.0)
          fmu += pts[k].second;
        else
          fref -= pts[k].second;
      }
      const double gx = g ? normal_cdf(x / std::sqrt(g->t)) : fref;
      gap = std::max(gap, std::abs(fmu - gx));
    }
    return gap;
  }
  double scale = 1.0;
  if (g) {
    scale = std::sqrt(g->t);
  } else {
    double s2 = 0.0;
    for (std::size_t i = 0; i < e->size(); ++i)
      s2 += e->weights[i] * 0.5 * (e->coords[2 * i] * e->coords[2 * i] + e->coords[2 * i + 1] * e->coords[2 * i + 1]);
    scale = s2 > 0.0 ? std::sqrt(s2) : 1.0;
  }
  double gap = 0.0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      const double x = scale * (-2.0 + 0.5 * a), y = scale * (-2.0 + 0.5 * b);
      const double fr = g ? normal_cdf(x / scale) * normal_cdf(y / scale) : empirical_cdf_2d(*e, x, y);
      gap = std::max(gap, std::abs(empirical_cdf_2d(mu, x, y) - fr));
    }
  return gap;
}

bool shrinking(std::span<const double> v) {
  if (v.empty()) return false;
  if (std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x) <= 1e-12; })) return true;
  return v.size() >= 2 && v.back() < v.front() && spearman_trend(v) < -0.8;
}

BickelFreedmanReport bickel_freedman_check(std::span<const EmpiricalMeasure> seq, const Reference& ref, double p) {
  check_order(p);
  if (seq.size() < 3) throw ValidationError("need at least 3 measures");
  BickelFreedmanReport r;
  const auto* g = std::get_if<GaussianTarget>(&ref);
  const auto* e = std::get_if<EmpiricalMeasure>(&ref);
  r.reference_moment = g ? gaussian_abs_moment(g->dim, g->t, p) : abs_moment(*e, p);
  for (const auto& m : seq) {
    m.validate();
    double d = 0.0;
    if (g) {
      d = d_p_to_gaussian(m, g->t, p, g->dim == 1 ? ReferenceMode::OneD : ReferenceMode::TwoD, g->ref_samples,
                          g->seed)
              .value;
    } else if (m.dim == 1) {
      d = d_p_1d(m, *e, p);
    } else {
      TransportOptions opt;
      opt.atom_cap = std::max(kDefaultAtomCap, m.size() + e->size());
      d = d_p_exact_2d(m, *e, p, opt).distance;
    }
    r.d.push_back(d);
    r.moment.push_back(abs_moment(m, p));
    r.moment_gap.push_back(std::abs(r.moment.back() - r.reference_moment));
    r.cdf_gap.push_back(cdf_gap(m, ref));
  }
  r.d_shrinks = shrinking(r.d);
  r.moment_shrinks = shrinking(r.moment_gap);
  r.cdf_shrinks = shrinking(r.cdf_gap);
  r.inconsistent = r.d_shrinks && !(r.moment_shrinks && r.cdf_shrinks);
  r.convergent = r.d_shrinks && r.moment_shrinks && r.cdf_shrinks;
  return r;
}

}  // namespace polyscale
