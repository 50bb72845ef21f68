// polyscale command line: sample, enumerate, blocks, wasserstein, scan.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyscale/autocorrelation.hpp"
#include "polyscale/exact.hpp"
#include "polyscale/gaussian.hpp"
#include "polyscale/paths.hpp"
#include "polyscale/report.hpp"
#include "polyscale/sampler.hpp"
#include "polyscale/scan.hpp"
#include "polyscale/wasserstein.hpp"

using namespace polyscale;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNoBracket = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// TOML (via the CLI11 config reader) converted to the JSON config schema.
std::string toml_to_json(const std::string& path) {
  CLI::ConfigTOML reader;
  const auto items = reader.from_file(path);
  ojson j = ojson::object();
  auto scalar = [](const std::string& s) -> ojson {
    if (s == "true") return true;
    if (s == "false") return false;
    try {
      std::size_t pos = 0;
      if (s.find_first_of(".eE") == std::string::npos && s.find('-') == std::string::npos) {
        const auto u = std::stoull(s, &pos);
        if (pos == s.size()) return u;
      }
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
    return s;
  };
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    ojson* target = &j;
    for (const auto& p : it.parents) target = &(*target)[p];
    const bool list = ends_with(it.name, "_grid");
    if (list) {
      ojson arr = ojson::array();
      for (const auto& s : it.inputs) arr.push_back(scalar(s));
      (*target)[it.name] = arr;
    } else if (it.inputs.size() == 1) {
      (*target)[it.name] = scalar(it.inputs.front());
    } else {
      throw ValidationError("config key '" + it.name + "' expects a single value");
    }
  }
  return j.dump();
}

/// Rows of comma- or whitespace-separated numbers; non-numeric lines are skipped.
EmpiricalMeasure read_points(const std::string& path, bool weighted) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path);
  std::string line;
  std::vector<double> coords, weights;
  int dim = -1;
  while (std::getline(f, line)) {
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (row.empty() || !numeric) continue;
    const int d = static_cast<int>(row.size()) - (weighted ? 1 : 0);
    if (dim < 0) dim = d;
    if (d != dim || d < 1 || d > 2) throw ValidationError(path + ": inconsistent or unsupported point dimension");
    coords.insert(coords.end(), row.begin(), row.begin() + d);
    if (weighted) weights.push_back(row.back());
  }
  if (dim < 0) throw ValidationError(path + ": no points");
  if (!weighted) return EmpiricalMeasure(dim, std::move(coords));
  return EmpiricalMeasure(dim, std::move(coords), std::move(weights));
}

ojson summary_json(const ExactSummary& s, bool full) {
  ojson j;
  j["n"] = s.n;
  j["log_z"] = s.log_z;
  j["energy_mean"] = s.energy_mean;
  j["end_to_end_mean_sq"] = s.end_to_end_sq;
  j["end_to_end_mean_l1_sq"] = s.end_to_end_l1_sq;
  if (full) {
    j["site_means"] = s.site_means;
    ojson cov = ojson::array();
    for (std::size_t i = 0; i < s.n; ++i)
      cov.push_back(std::vector<double>(s.pair_covariances.begin() + static_cast<std::ptrdiff_t>(i * s.n),
                                        s.pair_covariances.begin() + static_cast<std::ptrdiff_t>((i + 1) * s.n)));
    j["pair_covariances"] = cov;
  }
  return j;
}

SignConvention sign_from(const std::string& s) {
  if (s == "alignment_favoring") return SignConvention::AlignmentFavoring;
  if (s == "as_written") return SignConvention::AsWritten;
  throw ValidationError("sign must be alignment_favoring or as_written");
}

std::string spins_string(const SpinChain& c) {
  std::string s(c.size(), '+');
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] < 0) s[i] = '-';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-range polymer Monte Carlo and Wasserstein scaling diagnostics"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "MCMC samples of the polymer measure");
  double s_alpha = 1.5, s_beta = 0.5;
  std::size_t s_n = 64;
  SamplerConfig s_cfg;
  std::string s_algo = "metropolis", s_sign = "alignment_favoring", s_dump, s_out;
  bool s_direct = false;
  sample->add_option("--alpha", s_alpha, "kernel exponent");
  sample->add_option("--beta", s_beta, "inverse temperature");
  sample->add_option("--n", s_n, "polymer length");
  sample->add_option("--seed", s_cfg.seed, "master seed");
  sample->add_option("--algorithm", s_algo, "metropolis | heatbath | cluster");
  sample->add_option("--sign", s_sign, "alignment_favoring | as_written");
  sample->add_option("--burn-in", s_cfg.burn_in_sweeps, "burn-in sweeps");
  sample->add_option("--thinning", s_cfg.thinning_sweeps, "sweeps between samples");
  sample->add_option("--samples", s_cfg.n_samples, "samples per replica");
  sample->add_option("--replicas", s_cfg.replicas, "independent replicas");
  sample->add_flag("--auto-thinning", s_cfg.auto_thinning, "thinning from a pilot run");
  sample->add_flag("--direct", s_direct, "Metropolis on step sequences instead of the chain factorization");
  sample->add_option("--dump", s_dump, "CSV of sampled spin chains");
  sample->add_option("--out", s_out, "JSON summary (default stdout)");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "exact enumeration for small N");
  double e_alpha = 1.5, e_beta = 0.5;
  std::optional<double> e_beta_eff;
  std::size_t e_n = 4;
  bool e_chain = false, e_full = false;
  std::string e_sign = "alignment_favoring", e_out;
  enumerate->add_option("--alpha", e_alpha, "kernel exponent");
  enumerate->add_option("--beta", e_beta, "inverse temperature");
  enumerate->add_option("--beta-eff", e_beta_eff, "chain coupling (chain mode; default sign*beta/2)");
  enumerate->add_option("--n", e_n, "length");
  enumerate->add_option("--sign", e_sign, "alignment_favoring | as_written");
  enumerate->add_flag("--chain", e_chain, "enumerate one spin chain instead of the polymer");
  enumerate->add_flag("--full", e_full, "include means and covariance matrix");
  enumerate->add_option("--out", e_out, "JSON output (default stdout)");

  // blocks
  auto* blocks = app.add_subcommand("blocks", "block decomposition schedule");
  std::size_t b_n = 4096;
  std::optional<std::size_t> b_ell;
  double b_delta = 0.2;
  bool b_schedule = false;
  std::string b_out;
  blocks->add_option("--n", b_n, "chain length");
  blocks->add_option("--ell", b_ell, "block size (overrides --delta)");
  blocks->add_option("--delta", b_delta, "ell = floor(n^delta), delta < 1/4");
  blocks->add_flag("--schedule", b_schedule, "tabulate ell^3/m over n = 2^10 .. 2^20");
  blocks->add_option("--out", b_out, "JSON output (default stdout)");

  // wasserstein
  auto* wass = app.add_subcommand("wasserstein", "distance between two CSV point lists");
  std::string w_a, w_b, w_mode = "auto", w_norm = "euclidean", w_out;
  double w_p = 2.0;
  std::optional<double> w_gauss;
  std::uint64_t w_seed = 0;
  std::size_t w_ref = 512, w_cap = kDefaultAtomCap;
  bool w_plan = false, w_weighted = false;
  wass->add_option("a", w_a, "first point list")->required();
  wass->add_option("b", w_b, "second point list (omit with --gaussian)");
  wass->add_option("--p", w_p, "order in (0, 2]");
  wass->add_option("--mode", w_mode, "auto | 1d | 2d");
  wass->add_option("--norm", w_norm, "ground norm for 2d: euclidean | l1");
  wass->add_option("--gaussian", w_gauss, "compare a with N(0, t I) for this t");
  wass->add_option("--seed", w_seed, "seed of the Gaussian reference sample");
  wass->add_option("--ref-samples", w_ref, "Gaussian reference atoms in 2d mode");
  wass->add_option("--cap", w_cap, "aggregate atom cap for exact 2d transport");
  wass->add_flag("--plan", w_plan, "include the optimal coupling");
  wass->add_flag("--weighted", w_weighted, "last column holds atom weights");
  wass->add_option("--out", w_out, "JSON output (default stdout)");

  // scan
  auto* scan = app.add_subcommand("scan", "(beta, n) grid with diffusive / ballistic verdicts");
  ScanConfig cfg;
  std::string c_config, c_algo, c_sign;
  std::vector<double> c_beta, c_t;
  std::vector<std::size_t> c_n;
  std::optional<double> c_alpha, c_p;
  std::optional<std::uint64_t> c_seed;
  std::optional<std::size_t> c_replicas;
  std::optional<int> c_samples, c_groups;
  std::string c_out, c_csv, c_paths;
  bool c_verbose = false;
  scan->add_option("--config", c_config, "TOML or JSON config file");
  scan->add_option("--alpha", c_alpha, "kernel exponent in (1, 2]");
  scan->add_option("--beta", c_beta, "beta grid")->delimiter(',');
  scan->add_option("--n", c_n, "n grid")->delimiter(',');
  scan->add_option("--t", c_t, "t grid")->delimiter(',');
  scan->add_option("--p", c_p, "order in (0, 2]");
  scan->add_option("--seed", c_seed, "master seed");
  scan->add_option("--replicas", c_replicas, "replicas per cell");
  scan->add_option("--samples", c_samples, "samples per replica");
  scan->add_option("--groups", c_groups, "jackknife groups");
  scan->add_option("--algorithm", c_algo, "metropolis | heatbath | cluster");
  scan->add_option("--sign", c_sign, "alignment_favoring | as_written");
  scan->add_option("--out", c_out, "report JSON (default stdout)");
  scan->add_option("--csv", c_csv, "per-cell CSV");
  scan->add_option("--emit-paths", c_paths, "CSV of sample W_n paths");
  scan->add_flag("--verbose", c_verbose, "progress on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sample) {
      GibbsParams g;
      g.beta = s_beta;
      g.kernel = InteractionKernel::power_law(s_alpha, sign_from(s_sign));
      g.n = s_n;
      s_cfg.algorithm = parse_algorithm(s_algo);
      const SampleBatch batch = s_direct ? sample_polymer_direct(g, s_cfg) : sample_chain(g, s_cfg);
      ojson j;
      j["n"] = s_n;
      j["beta"] = s_beta;
      j["alpha"] = s_alpha;
      j["algorithm"] = to_string(s_cfg.algorithm);
      j["sampler"] = s_direct ? "polymer_direct" : "chain_pair";
      j["replicas"] = batch.replicas;
      j["samples_per_replica"] = batch.n_samples;
      j["thinning_sweeps"] = batch.thinning_sweeps;
      double acc = 0.0, e2 = 0.0;
      std::size_t na = 0;
      for (const auto& m : batch.meta)
        for (double a : m.acceptance) {
          acc += a;
          ++na;
        }
      j["mean_acceptance"] = na ? acc / static_cast<double>(na) : 0.0;
      if (!batch.meta.empty() && batch.meta[0].energy.size() >= 100) {
        try {
          j["tau_int_energy"] = autocorrelation_time(batch.meta[0].energy);
        } catch (const DegenerateTraceError&) {
          j["tau_int_energy"] = nullptr;
        }
      }
      for (const auto& p : batch.polymers()) {
        const auto e = p.end_point();
        e2 += static_cast<double>(e[0] * e[0] + e[1] * e[1]);
      }
      j["end_to_end_mean_sq"] = e2 / static_cast<double>(batch.configs.size());
      if (batch.configs.size() * 2 >= 2 && batch.replicas >= 1) {
        const auto h = hypothesis_stats(batch, BlockScheme::with_delta(s_n, 0.2),
                                        static_cast<int>(std::min<std::size_t>(20, batch.replicas)));
        j["var_ratio"] = h.var_ratio;
        j["block_var_ratio"] = h.block_var_ratio;
        j["chi_hat"] = h.chi_hat;
      }
      j["warnings"] = batch.warnings;
      if (!s_dump.empty()) {
        std::ostringstream os;
        os << "replica,sample,sigma1,sigma2\n";
        for (std::size_t c = 0; c < batch.configs.size(); ++c)
          os << c / batch.n_samples << ',' << c % batch.n_samples << ',' << spins_string(batch.configs[c].sigma1)
             << ',' << spins_string(batch.configs[c].sigma2) << '\n';
        write_text_file(s_dump, os.str());
      }
      emit(j.dump(2) + "\n", s_out);
      return 0;
    }

    if (*enumerate) {
      GibbsParams g;
      g.beta = e_beta;
      g.kernel = InteractionKernel::power_law(e_alpha, sign_from(e_sign));
      g.n = e_n;
      ojson j;
      if (e_chain) {
        const double be = e_beta_eff ? *e_beta_eff : g.chain_beta();
        j = summary_json(enumerate_chain(g, be), e_full);
        j.erase("end_to_end_mean_sq");
        j.erase("end_to_end_mean_l1_sq");
        j["beta_eff"] = be;
        j["chi_first_site"] =
            susceptibility_from_covariance(enumerate_chain(g, be), susceptibility_cutoff(e_n), ChiMode::FirstSite);
      } else {
        j = summary_json(enumerate_polymer(g), e_full);
        j["beta"] = e_beta;
      }
      emit(j.dump(2) + "\n", e_out);
      return 0;
    }

    if (*blocks) {
      ojson j;
      auto row = [](const BlockScheme& s) {
        ojson r;
        r["n"] = s.n;
        r["ell"] = s.ell;
        r["m"] = s.m;
        r["unblocked"] = s.n - s.m * s.ell;
        r["ell_cubed_over_m"] = s.lyapunov_ratio();
        return r;
      };
      if (b_schedule) {
        j = ojson::array();
        for (int e = 10; e <= 20; ++e) j.push_back(row(BlockScheme::with_delta(std::size_t{1} << e, b_delta)));
      } else {
        j = row(b_ell ? BlockScheme::with_ell(b_n, *b_ell) : BlockScheme::with_delta(b_n, b_delta));
      }
      emit(j.dump(2) + "\n", b_out);
      return 0;
    }

    if (*wass) {
      const EmpiricalMeasure a = read_points(w_a, w_weighted);
      ojson j;
      j["p"] = w_p;
      if (w_gauss) {
        const ReferenceMode mode = w_mode == "auto" ? (a.dim == 1 ? ReferenceMode::OneD : ReferenceMode::TwoD)
                                                    : parse_reference_mode(w_mode);
        const auto d = d_p_to_gaussian(a, *w_gauss, w_p, mode, w_ref, w_seed, mode == ReferenceMode::TwoD ? 10 : 0);
        j["reference"] = "gaussian";
        j["t"] = *w_gauss;
        j["distance"] = d.value;
        j["se"] = d.se;
      } else {
        if (w_b.empty()) throw ValidationError("second point list or --gaussian required");
        const EmpiricalMeasure b = read_points(w_b, w_weighted);
        const std::string mode = w_mode == "auto" ? (a.dim == 1 && b.dim == 1 ? "1d" : "2d") : w_mode;
        if (mode == "1d" && !w_plan) {
          j["distance"] = d_p_1d(a, b, w_p);
        } else {
          TransportOptions opt;
          opt.atom_cap = w_cap;
          if (w_norm == "l1")
            opt.norm = kernels::GroundNorm::L1;
          else if (w_norm != "euclidean")
            throw ValidationError("norm must be euclidean or l1");
          const auto r = d_p_exact_2d(a, b, w_p, opt);
          j["distance"] = r.distance;
          j["cost"] = r.plan.cost;
          if (w_plan) {
            ojson plan = ojson::array();
            for (const auto& e : r.plan.entries) plan.push_back({e.i, e.j, e.mass});
            j["plan"] = plan;
          }
        }
      }
      emit(j.dump(2) + "\n", w_out);
      return 0;
    }

    if (*scan) {
      if (!c_config.empty()) {
        const bool json = ends_with(c_config, ".json");
        apply_json_config(cfg, json ? read_file(c_config) : toml_to_json(c_config));
      }
      if (c_alpha) cfg.alpha = *c_alpha;
      if (!c_beta.empty()) cfg.beta_grid = c_beta;
      if (!c_n.empty()) cfg.n_grid = c_n;
      if (!c_t.empty()) cfg.t_grid = c_t;
      if (c_p) cfg.p = *c_p;
      if (c_seed) cfg.seed = *c_seed;
      if (c_replicas) cfg.replicas = *c_replicas;
      if (c_samples) cfg.samples_per_replica = *c_samples;
      if (c_groups) cfg.jackknife_groups = *c_groups;
      if (!c_algo.empty()) cfg.algorithm = parse_algorithm(c_algo);
      if (!c_sign.empty()) cfg.sign = sign_from(c_sign);
      if (!c_out.empty()) cfg.output = c_out;
      if (!c_csv.empty()) cfg.csv_output = c_csv;
      if (!c_paths.empty()) cfg.paths_output = c_paths;
      if (c_verbose) cfg.verbose = true;
      cfg.validate();

      std::string path_rows;
      const ScanReport report = run_scan(cfg, [&](const CellReport& c, const std::vector<PathProcess>& paths) {
        if (!cfg.paths_output.empty()) path_rows += paths_csv_rows(c.beta, c.n, paths);
      });
      emit(report_json(report), cfg.output);
      if (!cfg.csv_output.empty()) write_text_file(cfg.csv_output, cells_csv(report));
      if (!cfg.paths_output.empty()) write_text_file(cfg.paths_output, paths_csv_header() + path_rows);
      if (!report.bracket && cfg.beta_grid.size() >= 2) {
        std::cerr << "no crossover bracket in the beta grid\n";
        return kExitNoBracket;
      }
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NoBracketError& e) {
    std::cerr << e.what() << "\n";
    return kExitNoBracket;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
