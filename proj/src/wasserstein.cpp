#include "polyscale/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyscale/assignment.hpp"
#include "polyscale/stats.hpp"
#include "polyscale/transport.hpp"

namespace polyscale {

EmpiricalMeasure::EmpiricalMeasure(int d, std::vector<double> c) : dim(d), coords(std::move(c)) {
  if (dim < 1) throw ValidationError("measure dimension must be >= 1");
  const std::size_t k = coords.size() / static_cast<std::size_t>(dim);
  weights.assign(k, k ? 1.0 / static_cast<double>(k) : 0.0);
}

EmpiricalMeasure::EmpiricalMeasure(int d, std::vector<double> c, std::vector<double> w)
    : dim(d), coords(std::move(c)), weights(std::move(w)) {}

bool EmpiricalMeasure::uniform() const {
  return std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights.front(); });
}

void EmpiricalMeasure::validate() const {
  if (dim < 1) throw ValidationError("measure dimension must be >= 1");
  if (weights.empty()) throw ValidationError("measure has no atoms");
  if (coords.size() != weights.size() * static_cast<std::size_t>(dim))
    throw ValidationError("atom coordinates do not match dimension");
  CompensatedSum s;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("negative or NaN weight");
    s += w;
  }
  if (std::abs(s.value() - 1.0) > kWeightTolerance)
    throw InfeasibleWeightsError("weights sum to " + std::to_string(s.value()) + ", expected 1");
  for (double x : coords)
    if (!std::isfinite(x)) throw ValidationError("non-finite atom coordinate");
}

EmpiricalMeasure EmpiricalMeasure::scaled(double a) const {
  EmpiricalMeasure out = *this;
  for (auto& x : out.coords) x *= a;
  return out;
}

EmpiricalMeasure EmpiricalMeasure::embedded_2d() const {
  if (dim != 1) throw ValidationError("embedding expects a 1D measure");
  std::vector<double> c(2 * size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) c[2 * i] = coords[i];
  return EmpiricalMeasure(2, std::move(c), weights);
}

void check_order(double p) {
  if (!(p > 0.0 && p <= 2.0)) throw ValidationError("order p must lie in (0, 2]");
}

namespace {

inline double abs_pow(double d, double p) {
  d = std::abs(d);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

std::vector<std::size_t> sorted_order(const EmpiricalMeasure& m) {
  std::vector<std::size_t> idx(m.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return m.coords[a] < m.coords[b]; });
  return idx;
}

}  // namespace

double cost_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  check_order(p);
  mu.validate();
  nu.validate();
  if (mu.dim != 1 || nu.dim != 1) throw ValidationError("d_p_1d expects 1D measures");
  const auto a = sorted_order(mu), b = sorted_order(nu);
  auto breakpoints = [](const EmpiricalMeasure& m, const std::vector<std::size_t>& order) {
    std::vector<double> u(order.size());
    CompensatedSum s;
    for (std::size_t k = 0; k < order.size(); ++k) {
      s += m.weights[order[k]];
      u[k] = s.value();
    }
    u.back() = 1.0;
    return u;
  };
  const auto ua = breakpoints(mu, a), ub = breakpoints(nu, b);
  CompensatedSum cost;
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < a.size() && j < b.size()) {
    const double next = std::min(ua[i], ub[j]);
    if (next > u) cost += (next - u) * abs_pow(mu.coords[a[i]] - nu.coords[b[j]], p);
    u = next;
    if (ua[i] <= next) ++i;
    if (ub[j] <= next) ++j;
  }
  return cost.value();
}

double d_p_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  return std::pow(cost_1d(mu, nu, p), 1.0 / p);
}

TransportResult d_p_exact_2d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                             const TransportOptions& opt) {
  check_order(p);
  mu.validate();
  nu.validate();
  if (mu.dim != nu.dim) throw ValidationError("dimension mismatch");
  if (mu.size() + nu.size() > opt.atom_cap)
    throw CapExceededError("atom count " + std::to_string(mu.size() + nu.size()) + " exceeds cap " +
                           std::to_string(opt.atom_cap));
  const auto c = kernels::cost_matrix_parallel(mu.coords, nu.coords, mu.dim, p, opt.norm);
  const std::size_t m = nu.size();
  TransportResult res;
  if (mu.size() == nu.size() && mu.uniform() && nu.uniform()) {
    const auto a = solve_assignment(c, m);
    const double w = mu.weights.front();
    for (std::size_t i = 0; i < m; ++i) res.plan.entries.push_back({i, a.row_to_col[i], w});
    res.plan.cost = a.cost / static_cast<double>(m);
  } else {
    const auto flow = solve_transport(mu.weights, nu.weights, c);
    CompensatedSum cost;
    for (const auto& e : flow) {
      res.plan.entries.push_back({e.i, e.j, e.mass});
      cost += e.mass * c[e.i * m + e.j];
    }
    res.plan.cost = cost.value();
  }
  res.distance = std::pow(std::max(res.plan.cost, 0.0), 1.0 / p);
  return res;
}

double plan_marginal_error(const CouplingPlan& plan, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  for (const auto& e : plan.entries) {
    if (e.mass < 0.0) return std::abs(e.mass);
    row.at(e.i) += e.mass;
    col.at(e.j) += e.mass;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) err = std::max(err, std::abs(row[i] - mu.weights[i]));
  for (std::size_t j = 0; j < col.size(); ++j) err = std::max(err, std::abs(col[j] - nu.weights[j]));
  return err;
}

}  // namespace polyscale
