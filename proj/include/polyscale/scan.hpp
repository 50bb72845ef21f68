#pragma once

// (beta, n) experiment grids: sampling, path statistics, distances to the
// Brownian marginals and the diffusive / ballistic classification.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polyscale/paths.hpp"
#include "polyscale/sampler.hpp"

namespace polyscale {

class NoBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { Diffusive, Ballistic, Undecided };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct VerdictThresholds {
  /// |Spearman rho| a d_p trend must exceed.
  double spearman = 0.8;
  double gamma_diffusive = 0.6;
  double gamma_ballistic = 0.9;
  double speed_sq_min = 0.01;
  /// Ballistic rows need speed >= speed_se_factor * SE(speed).
  double speed_se_factor = 10.0;
  /// Sanity window for gamma_hat.
  double gamma_window_lo = 0.4;
  double gamma_window_hi = 1.1;
};

struct ScanConfig {
  double alpha = 1.5;
  SignConvention sign = SignConvention::AlignmentFavoring;
  std::vector<double> beta_grid;
  std::vector<std::size_t> n_grid;
  std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
  double p = 2.0;

  std::size_t replicas = 200;
  int samples_per_replica = 5;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::ClusterLongRange;
  int burn_in_sweeps = 20;
  int thinning_sweeps = 1;
  bool auto_thinning = true;
  int pilot_sweeps = 200;

  double block_delta = 0.2;
  int jackknife_groups = 20;
  /// Reference atoms for the 2D route used when p != 2.
  std::size_t ref_samples = 512;
  VerdictThresholds thresholds;

  std::string output;
  std::string csv_output;
  std::string paths_output;
  bool verbose = false;

  void validate() const;
};

struct CellReport {
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t m = 0;
  double lyapunov_ratio = 0.0;
  HypothesisStats hyp;
  double chi_tail_bound = 0.0;

  std::vector<double> t;
  std::vector<double> d_p;
  std::vector<double> d_p_se;
  double d_p_max = 0.0;

  double end_to_end_sq = 0.0;
  double end_to_end_sq_se = 0.0;
  double end_to_end_l1_sq = 0.0;
  double end_to_end_l1_sq_se = 0.0;
  /// E||S_N||_1 / N
  double speed = 0.0;
  double speed_se = 0.0;
  /// E||S_N||_1^2 / N^2
  double l1_sq_ratio = 0.0;
  double l1_sq_ratio_se = 0.0;
  /// E|S^c_N| / N over both chains.
  double m_hat = 0.0;
  double m_hat_se = 0.0;
  /// E||W_n(1)||^2, limit 2.
  double w_second_moment = 0.0;
  double w_second_moment_se = 0.0;

  int thinning_sweeps = 1;
  double tau_int = 0.0;
  bool low_confidence = false;
  std::vector<std::string> warnings;
};

struct BetaRow {
  double beta = 0.0;
  std::vector<CellReport> cells;
  double gamma_hat = 0.0;
  double gamma_se = 0.0;
  bool gamma_in_window = true;
  double d_trend = 0.0;
  Verdict verdict = Verdict::Undecided;
  bool low_confidence = false;
};

struct ScanReport {
  ScanConfig config;
  std::vector<BetaRow> rows;
  std::optional<std::pair<double, double>> bracket;
};

struct RowStatistics {
  std::vector<std::size_t> n;
  std::vector<double> d;
  double gamma_hat = 0.0;
  std::vector<double> speed;
  std::vector<double> speed_se;
};

Verdict classify(const RowStatistics& row, const VerdictThresholds& th = {});
RowStatistics row_statistics(const BetaRow& row);

/// gamma_hat = slope / 2 of a weighted fit of log E||S_N||^2 on log N.
LineFit fit_gamma(std::span<const std::size_t> n, std::span<const double> e2, std::span<const double> e2_se);

/// Tightest (beta_lo, beta_hi) with beta_lo diffusive below beta_hi ballistic.
std::pair<double, double> bracket_crossover(std::span<const double> betas, std::span<const Verdict> verdicts);
std::pair<double, double> bracket_crossover(const ScanReport& report);

using CellCallback = std::function<void(const CellReport&, const std::vector<PathProcess>&)>;

/// Runs every (beta, n) cell; cells are evaluated in grid order and
/// replicas within a cell in parallel. Paths are collected for the callback
/// only when cfg.paths_output is set.
ScanReport run_scan(const ScanConfig& cfg, const CellCallback& on_cell = {});

/// One cell of the grid; optionally returns W_n paths of the first few replicas.
CellReport run_cell(const ScanConfig& cfg, double beta, std::size_t n, std::vector<PathProcess>* paths = nullptr,
                    std::size_t max_paths = 4);

/// Heuristic size of the neglected susceptibility tail,
/// 2 |beta_eff| chi^2 sum_{k > kcut} V(k).
double chi_tail_heuristic(const InteractionKernel& k, std::size_t kcut, double beta_eff, double chi);

}  // namespace polyscale
