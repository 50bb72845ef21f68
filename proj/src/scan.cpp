#include "polyscale/scan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>

#include "polyscale/gaussian.hpp"
#include "polyscale/kernels.hpp"
#include "polyscale/report.hpp"

namespace polyscale {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Diffusive:
      return "diffusive";
    case Verdict::Ballistic:
      return "ballistic";
    case Verdict::Undecided:
      return "undecided";
  }
  return "undecided";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "diffusive" || s == "D") return Verdict::Diffusive;
  if (s == "ballistic" || s == "B") return Verdict::Ballistic;
  if (s == "undecided" || s == "U") return Verdict::Undecided;
  throw ValidationError("unknown verdict '" + s + "'");
}

namespace {

template <class T>
void require_sorted(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ValidationError(std::string(name) + " must be nonempty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) throw ValidationError(std::string(name) + " must be strictly increasing");
}

}  // namespace

void ScanConfig::validate() const {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ValidationError("alpha must lie in (1, 2]");
  require_sorted(beta_grid, "beta_grid");
  require_sorted(n_grid, "n_grid");
  require_sorted(t_grid, "t_grid");
  for (double b : beta_grid)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("beta values must be finite and >= 0");
  if (n_grid.front() < 2) throw ValidationError("n values must be >= 2");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("t values must lie in (0, 1]");
  check_order(p);
  if (replicas < 2) throw ValidationError("replicas must be >= 2");
  if (samples_per_replica < 1) throw ValidationError("samples_per_replica must be >= 1");
  if (burn_in_sweeps < 0) throw ValidationError("burn_in_sweeps must be >= 0");
  if (thinning_sweeps < 1) throw ValidationError("thinning_sweeps must be >= 1");
  if (auto_thinning && pilot_sweeps < 100) throw ValidationError("pilot_sweeps must be >= 100");
  if (!(block_delta > 0.0 && block_delta < 0.25)) throw ValidationError("block_delta must lie in (0, 1/4)");
  if (jackknife_groups < 2) throw ValidationError("jackknife_groups must be >= 2");
  if (static_cast<std::size_t>(jackknife_groups) > replicas)
    throw ValidationError("jackknife_groups must not exceed replicas");
  if (ref_samples < static_cast<std::size_t>(2 * jackknife_groups)) throw ValidationError("ref_samples too small");
  if (algorithm == Algorithm::ClusterLongRange && sign == SignConvention::AsWritten)
    throw ValidationError("cluster_long_range requires the alignment-favoring sign convention");
}

double chi_tail_heuristic(const InteractionKernel& k, std::size_t kcut, double beta_eff, double chi) {
  double tail = 0.0;
  switch (k.kind()) {
    case InteractionKernel::Kind::PowerLaw:
      tail = std::pow(static_cast<double>(kcut) + 0.5, 1.0 - k.alpha()) / (k.alpha() - 1.0);
      break;
    case InteractionKernel::Kind::FiniteRange:
      tail = static_cast<double>(k.range()) > static_cast<double>(kcut)
                 ? k.strength() * static_cast<double>(static_cast<std::size_t>(k.range()) - kcut)
                 : 0.0;
      break;
    case InteractionKernel::Kind::Custom:
      for (std::size_t r = kcut + 1; r <= k.table().size(); ++r) tail += k.table()[r - 1];
      break;
  }
  return 2.0 * std::abs(beta_eff) * chi * chi * tail;
}

LineFit fit_gamma(std::span<const std::size_t> n, std::span<const double> e2, std::span<const double> e2_se) {
  if (n.size() != e2.size() || n.size() < 2) throw ValidationError("need >= 2 matching points for the exponent fit");
  std::vector<double> x(n.size()), y(n.size()), w;
  bool weighted = e2_se.size() == n.size();
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(e2[i] > 0.0)) throw ValidationError("E||S||^2 must be positive");
    x[i] = std::log(static_cast<double>(n[i]));
    y[i] = std::log(e2[i]);
    if (weighted && !(e2_se[i] > 0.0)) weighted = false;
  }
  if (weighted)
    for (std::size_t i = 0; i < n.size(); ++i) w.push_back((e2[i] / e2_se[i]) * (e2[i] / e2_se[i]));
  LineFit f = fit_line(x, y, w);
  f.slope /= 2.0;
  f.slope_se /= 2.0;
  f.intercept /= 2.0;
  return f;
}

Verdict classify(const RowStatistics& row, const VerdictThresholds& th) {
  if (row.n.size() < 3 || row.d.size() != row.n.size())
    throw ValidationError("classification needs d_p at >= 3 values of n");
  std::vector<double> logn(row.n.size());
  for (std::size_t i = 0; i < row.n.size(); ++i) logn[i] = std::log(static_cast<double>(row.n[i]));
  const double rho = spearman(logn, row.d);
  if (rho < -th.spearman && row.gamma_hat < th.gamma_diffusive) return Verdict::Diffusive;
  if (rho > th.spearman && row.gamma_hat > th.gamma_ballistic) {
    if (row.speed.size() != row.n.size()) return Verdict::Undecided;
    for (std::size_t i = 0; i < row.speed.size(); ++i) {
      const double se = i < row.speed_se.size() ? row.speed_se[i] : 0.0;
      if (!(row.speed[i] * row.speed[i] > th.speed_sq_min)) return Verdict::Undecided;
      if (!(row.speed[i] >= th.speed_se_factor * se)) return Verdict::Undecided;
    }
    return Verdict::Ballistic;
  }
  return Verdict::Undecided;
}

RowStatistics row_statistics(const BetaRow& row) {
  RowStatistics s;
  for (const auto& c : row.cells) {
    s.n.push_back(c.n);
    s.d.push_back(c.d_p_max);
    s.speed.push_back(c.speed);
    s.speed_se.push_back(c.speed_se);
  }
  s.gamma_hat = row.gamma_hat;
  return s;
}

std::pair<double, double> bracket_crossover(std::span<const double> betas, std::span<const Verdict> verdicts) {
  if (betas.size() != verdicts.size()) throw ValidationError("betas and verdicts differ in length");
  std::optional<std::pair<double, double>> best;
  for (std::size_t j = 0; j < verdicts.size(); ++j) {
    if (verdicts[j] != Verdict::Ballistic) continue;
    for (std::size_t i = j; i-- > 0;) {
      if (verdicts[i] == Verdict::Ballistic) break;
      if (verdicts[i] != Verdict::Diffusive) continue;
      if (!best || betas[j] - betas[i] < best->second - best->first) best = std::make_pair(betas[i], betas[j]);
      break;
    }
  }
  if (!best) throw NoBracketError("no bracket: the grid has no diffusive row followed by a ballistic row");
  return *best;
}

std::pair<double, double> bracket_crossover(const ScanReport& report) {
  std::vector<double> b;
  std::vector<Verdict> v;
  for (const auto& r : report.rows) {
    b.push_back(r.beta);
    v.push_back(r.verdict);
  }
  return bracket_crossover(b, v);
}

namespace {

struct EndSums {
  std::int64_t count = 0;
  /// sum of S1^2 + S2^2 = 2 ||S||^2
  std::int64_t sq = 0;
  /// sum of ||S||_1^2 with ||S||_1 = max(|S1|, |S2|)
  std::int64_t l1_sq = 0;
  std::int64_t l1 = 0;
  /// sum of |S1| + |S2|
  std::int64_t abs_chain = 0;

  void add(std::int64_t s1, std::int64_t s2) {
    const std::int64_t l = std::max(std::abs(s1), std::abs(s2));
    ++count;
    sq += s1 * s1 + s2 * s2;
    l1_sq += l * l;
    l1 += l;
    abs_chain += std::abs(s1) + std::abs(s2);
  }
  EndSums& operator+=(const EndSums& o) {
    count += o.count;
    sq += o.sq;
    l1_sq += o.l1_sq;
    l1 += o.l1;
    abs_chain += o.abs_chain;
    return *this;
  }
  EndSums& operator-=(const EndSums& o) {
    count -= o.count;
    sq -= o.sq;
    l1_sq -= o.l1_sq;
    l1 -= o.l1;
    abs_chain -= o.abs_chain;
    return *this;
  }
};

double as_d(std::int64_t x) { return static_cast<double>(x); }

}  // namespace

CellReport run_cell(const ScanConfig& cfg, double beta, std::size_t n, std::vector<PathProcess>* paths,
                    std::size_t max_paths) {
  CellReport cell;
  cell.beta = beta;
  cell.n = n;
  GibbsParams g;
  g.beta = beta;
  g.kernel = InteractionKernel::power_law(cfg.alpha, cfg.sign);
  g.n = n;
  g.validate();
  const double beta_eff = g.chain_beta();
  const std::uint64_t cell_seed = derive_seed(cfg.seed, {std::bit_cast<std::uint64_t>(beta), n});
  const BlockScheme scheme = BlockScheme::with_delta(n, cfg.block_delta);
  cell.ell = scheme.ell;
  cell.m = scheme.m;
  cell.lyapunov_ratio = scheme.lyapunov_ratio();

  int thin = cfg.thinning_sweeps;
  if (cfg.auto_thinning) {
    SamplerConfig pc;
    pc.seed = cell_seed;
    pc.algorithm = cfg.algorithm;
    pc.burn_in_sweeps = cfg.burn_in_sweeps;
    pc.pilot_sweeps = cfg.pilot_sweeps;
    double tau = 0.0;
    thin = pilot_thinning(g, pc, &tau);
    cell.tau_int = tau;
    if (tau > static_cast<double>(cfg.pilot_sweeps) / 50.0) {
      cell.low_confidence = true;
      cell.warnings.push_back("pilot run short relative to tau_int = " + std::to_string(tau));
    }
  }
  cell.thinning_sweeps = thin;

  const std::size_t R = cfg.replicas;
  const auto S = static_cast<std::size_t>(cfg.samples_per_replica);
  const std::size_t G = static_cast<std::size_t>(cfg.jackknife_groups);
  const std::size_t T = cfg.t_grid.size();
  const std::size_t P = R * S;
  // per (polymer sample, chain, t): unnormalized S_c(nt)
  std::vector<double> values(P * 2 * T);
  std::vector<std::int64_t> ends(P * 2);
  std::vector<ChainMoments> moments(G, ChainMoments(n, scheme));
  std::vector<std::mutex> locks(G);
  std::vector<SpinChainPair> kept(paths ? std::min(max_paths, R) : 0);

  auto table = std::make_shared<const KernelTable>(g.kernel, n);
  kernels::for_each_replica_parallel(R, [&](std::size_t r) {
    ChainSampler a(table, n, beta_eff, cfg.algorithm, chain_seed(cell_seed, r, 0));
    ChainSampler b(table, n, beta_eff, cfg.algorithm, chain_seed(cell_seed, r, 1));
    a.sweeps(cfg.burn_in_sweeps);
    b.sweeps(cfg.burn_in_sweeps);
    ChainMoments local(n, scheme);
    for (std::size_t s = 0; s < S; ++s) {
      a.sweeps(thin);
      b.sweeps(thin);
      const std::size_t k = r * S + s;
      for (int c = 0; c < 2; ++c) {
        const auto& spins = c == 0 ? a.spins() : b.spins();
        local.add(spins);
        const auto ps = partial_sums(spins);
        for (std::size_t ti = 0; ti < T; ++ti) values[(k * 2 + c) * T + ti] = interpolate_sum(ps, cfg.t_grid[ti]);
        ends[k * 2 + c] = ps.back();
      }
      if (s == 0 && r < kept.size()) kept[r] = SpinChainPair(a.spins(), b.spins());
    }
    std::lock_guard<std::mutex> lock(locks[r % G]);
    moments[r % G] += local;
  });

  cell.hyp = hypothesis_stats(moments);
  ChainMoments total = moments[0];
  for (std::size_t q = 1; q < G; ++q) total += moments[q];
  std::vector<double> chi_loo(G);
  for (std::size_t q = 0; q < G; ++q) {
    ChainMoments rest = total;
    rest -= moments[q];
    chi_loo[q] = rest.chi_hat();
  }
  const double chi = cell.hyp.chi_hat;
  cell.chi_tail_bound = chi_tail_heuristic(g.kernel, cell.hyp.k_cut, beta_eff, chi);
  if (!(chi > 0.0) || std::any_of(chi_loo.begin(), chi_loo.end(), [](double c) { return !(c > 0.0); }))
    throw ValidationError("non-positive susceptibility estimate at beta=" + std::to_string(beta) +
                          ", n=" + std::to_string(n));
  auto chi_of = [&](int q) { return q < 0 ? chi : chi_loo[static_cast<std::size_t>(q)]; };
  auto group_of = [&](std::size_t sample) { return (sample / S) % G; };
  const double rn = std::sqrt(static_cast<double>(n));
  const int Gi = static_cast<int>(G);

  cell.t = cfg.t_grid;
  for (std::size_t ti = 0; ti < T; ++ti) {
    const double t = cfg.t_grid[ti];
    Estimate e;
    if (cfg.p == 2.0) {
      // d_2(W_n(t), B(t))^2 = 2 W_2(chain marginal, N(0, t))^2: the rotated
      // path has two independent, identically distributed coordinates. The
      // chain law is invariant under a global spin flip, so each value enters
      // together with its mirror image.
      std::vector<std::pair<double, std::uint32_t>> sorted(P * 4);
      for (std::size_t k = 0; k < P; ++k)
        for (int c = 0; c < 2; ++c) {
          const double v = values[(k * 2 + c) * T + ti] / rn;
          const auto grp = static_cast<std::uint32_t>(group_of(k));
          sorted[k * 4 + c * 2] = {v, grp};
          sorted[k * 4 + c * 2 + 1] = {-v, grp};
        }
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> x;
      x.reserve(sorted.size());
      e = group_jackknife(Gi, [&](int q) {
        x.clear();
        const double scale = 1.0 / std::sqrt(chi_of(q));
        for (const auto& [v, grp] : sorted)
          if (static_cast<int>(grp) != q) x.push_back(v * scale);
        return std::sqrt(2.0 * gaussian_cost_sorted(x, t, 2.0));
      });
    } else {
      std::vector<double> pts(P * 2);
      const double scale = 1.0 / (rn * std::sqrt(chi));
      for (std::size_t k = 0; k < P; ++k) {
        const double x1 = values[(k * 2) * T + ti] * scale, x2 = values[(k * 2 + 1) * T + ti] * scale;
        pts[2 * k] = (x1 + x2) / std::sqrt(2.0);
        pts[2 * k + 1] = (x2 - x1) / std::sqrt(2.0);
      }
      const auto d = d_p_to_gaussian(EmpiricalMeasure(2, std::move(pts)), t, cfg.p, ReferenceMode::TwoD,
                                     cfg.ref_samples, cell_seed, Gi);
      e.value = d.value;
      e.se = d.se;
    }
    cell.d_p.push_back(e.value);
    cell.d_p_se.push_back(e.se);
  }
  cell.d_p_max = *std::max_element(cell.d_p.begin(), cell.d_p.end());

  std::vector<EndSums> es(G);
  for (std::size_t k = 0; k < P; ++k) es[group_of(k)].add(ends[2 * k], ends[2 * k + 1]);
  EndSums all;
  for (const auto& q : es) all += q;
  auto jack = [&](auto&& stat) {
    return group_jackknife(Gi, [&](int q) {
      EndSums s = all;
      if (q >= 0) s -= es[static_cast<std::size_t>(q)];
      return stat(s, chi_of(q));
    });
  };
  const double nd = static_cast<double>(n);
  auto set = [](double& v, double& se, const Estimate& e) {
    v = e.value;
    se = e.se;
  };
  set(cell.end_to_end_sq, cell.end_to_end_sq_se,
      jack([&](const EndSums& s, double) { return as_d(s.sq) / (2.0 * as_d(s.count)); }));
  set(cell.end_to_end_l1_sq, cell.end_to_end_l1_sq_se,
      jack([&](const EndSums& s, double) { return as_d(s.l1_sq) / as_d(s.count); }));
  set(cell.speed, cell.speed_se, jack([&](const EndSums& s, double) { return as_d(s.l1) / (as_d(s.count) * nd); }));
  set(cell.l1_sq_ratio, cell.l1_sq_ratio_se,
      jack([&](const EndSums& s, double) { return as_d(s.l1_sq) / (as_d(s.count) * nd * nd); }));
  set(cell.m_hat, cell.m_hat_se,
      jack([&](const EndSums& s, double) { return as_d(s.abs_chain) / (2.0 * as_d(s.count) * nd); }));
  set(cell.w_second_moment, cell.w_second_moment_se,
      jack([&](const EndSums& s, double c) { return as_d(s.sq) / (as_d(s.count) * nd * c); }));

  if (paths) {
    paths->clear();
    const double sigma = std::sqrt(chi / 2.0);
    for (const auto& pair : kept) paths->push_back(build_w_path(pair, sigma));
  }
  return cell;
}

namespace {

void finish_row(BetaRow& row, const VerdictThresholds& th) {
  std::vector<std::size_t> ns;
  std::vector<double> e2, e2_se, d;
  for (const auto& c : row.cells) {
    ns.push_back(c.n);
    e2.push_back(c.end_to_end_sq);
    e2_se.push_back(c.end_to_end_sq_se);
    d.push_back(c.d_p_max);
    row.low_confidence = row.low_confidence || c.low_confidence;
  }
  if (ns.size() >= 2) {
    const auto f = fit_gamma(ns, e2, e2_se);
    row.gamma_hat = f.slope;
    row.gamma_se = f.slope_se;
    row.gamma_in_window = row.gamma_hat >= th.gamma_window_lo && row.gamma_hat <= th.gamma_window_hi;
  }
  if (ns.size() >= 2) {
    std::vector<double> logn;
    for (auto v : ns) logn.push_back(std::log(static_cast<double>(v)));
    row.d_trend = spearman(logn, d);
  }
  row.verdict = ns.size() >= 3 ? classify(row_statistics(row), th) : Verdict::Undecided;
}

}  // namespace

ScanReport run_scan(const ScanConfig& cfg, const CellCallback& on_cell) {
  cfg.validate();
  ScanReport report;
  report.config = cfg;
  try {
    for (double beta : cfg.beta_grid) {
      BetaRow row;
      row.beta = beta;
      for (std::size_t n : cfg.n_grid) {
        std::vector<PathProcess> paths;
        auto cell = run_cell(cfg, beta, n, cfg.paths_output.empty() ? nullptr : &paths);
        if (cfg.verbose)
          std::fprintf(stderr, "beta=%g n=%zu chi_hat=%.4f d_p_max=%.4f E|S|^2/n=%.4f thin=%d\n", beta, n,
                       cell.hyp.chi_hat, cell.d_p_max, cell.end_to_end_sq / static_cast<double>(n),
                       cell.thinning_sweeps);
        if (on_cell) on_cell(cell, paths);
        row.cells.push_back(std::move(cell));
      }
      finish_row(row, cfg.thresholds);
      report.rows.push_back(std::move(row));
    }
  } catch (...) {
    if (!cfg.output.empty()) {
      try {
        write_text_file(cfg.output + ".partial.json", report_json(report));
      } catch (...) {
      }
    }
    throw;
  }
  try {
    report.bracket = bracket_crossover(report);
  } catch (const NoBracketError&) {
    report.bracket.reset();
  }
  return report;
}

}  // namespace polyscale
