#include "polyscale/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace polyscale {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sign_name(SignConvention s) {
  return s == SignConvention::AlignmentFavoring ? "alignment_favoring" : "as_written";
}

SignConvention parse_sign(const std::string& s) {
  if (s == "alignment_favoring") return SignConvention::AlignmentFavoring;
  if (s == "as_written") return SignConvention::AsWritten;
  throw ValidationError("sign must be alignment_favoring or as_written, got '" + s + "'");
}

ojson thresholds_json(const VerdictThresholds& t) {
  ojson j;
  j["spearman"] = t.spearman;
  j["gamma_diffusive"] = t.gamma_diffusive;
  j["gamma_ballistic"] = t.gamma_ballistic;
  j["speed_sq_min"] = t.speed_sq_min;
  j["speed_se_factor"] = t.speed_se_factor;
  j["gamma_window_lo"] = t.gamma_window_lo;
  j["gamma_window_hi"] = t.gamma_window_hi;
  return j;
}

ojson config_obj(const ScanConfig& c) {
  ojson j;
  j["alpha"] = c.alpha;
  j["sign"] = sign_name(c.sign);
  j["beta_grid"] = c.beta_grid;
  j["n_grid"] = c.n_grid;
  j["t_grid"] = c.t_grid;
  j["p"] = c.p;
  j["replicas"] = c.replicas;
  j["samples_per_replica"] = c.samples_per_replica;
  j["seed"] = c.seed;
  j["algorithm"] = to_string(c.algorithm);
  j["burn_in_sweeps"] = c.burn_in_sweeps;
  j["thinning_sweeps"] = c.thinning_sweeps;
  j["auto_thinning"] = c.auto_thinning;
  j["pilot_sweeps"] = c.pilot_sweeps;
  j["block_delta"] = c.block_delta;
  j["jackknife_groups"] = c.jackknife_groups;
  j["ref_samples"] = c.ref_samples;
  j["thresholds"] = thresholds_json(c.thresholds);
  return j;
}

ojson hyp_json(const HypothesisStats& h) {
  ojson j;
  j["var_ratio"] = h.var_ratio;
  j["var_ratio_se"] = h.var_ratio_se;
  j["block_var_ratio"] = h.block_var_ratio;
  j["block_var_ratio_se"] = h.block_var_ratio_se;
  j["third_moment_max"] = h.third_moment_max;
  j["chi_hat"] = h.chi_hat;
  j["chi_hat_se"] = h.chi_hat_se;
  j["chi_hat_first_site"] = h.chi_hat_first_site;
  j["k_cut"] = h.k_cut;
  j["chain_samples"] = h.samples;
  return j;
}

ojson cell_obj(const CellReport& c) {
  ojson j;
  j["beta"] = c.beta;
  j["n"] = c.n;
  j["ell"] = c.ell;
  j["m"] = c.m;
  j["ell_cubed_over_m"] = c.lyapunov_ratio;
  j["hypotheses"] = hyp_json(c.hyp);
  j["chi_tail_bound"] = c.chi_tail_bound;
  ojson d = ojson::array();
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    ojson e;
    e["t"] = c.t[i];
    e["d_p"] = c.d_p[i];
    e["d_p_se"] = c.d_p_se[i];
    d.push_back(e);
  }
  j["d_p"] = d;
  j["d_p_max"] = c.d_p_max;
  j["end_to_end_mean_sq"] = {{"l2", c.end_to_end_sq}, {"l2_se", c.end_to_end_sq_se},
                             {"l1", c.end_to_end_l1_sq}, {"l1_se", c.end_to_end_l1_sq_se}};
  j["ballistic_speed"] = c.speed;
  j["ballistic_speed_se"] = c.speed_se;
  j["l1_sq_ratio"] = c.l1_sq_ratio;
  j["l1_sq_ratio_se"] = c.l1_sq_ratio_se;
  j["m_hat"] = c.m_hat;
  j["m_hat_se"] = c.m_hat_se;
  j["w_second_moment"] = c.w_second_moment;
  j["w_second_moment_se"] = c.w_second_moment_se;
  j["thinning_sweeps"] = c.thinning_sweeps;
  j["tau_int"] = c.tau_int;
  j["low_confidence"] = c.low_confidence;
  j["warnings"] = c.warnings;
  return j;
}

}  // namespace

std::string cell_json(const CellReport& c) { return cell_obj(c).dump(2); }

std::string report_json(const ScanReport& r) {
  ojson j;
  j["config"] = config_obj(r.config);
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    ojson o;
    o["beta"] = row.beta;
    o["gamma_hat"] = row.gamma_hat;
    o["gamma_se"] = row.gamma_se;
    o["gamma_in_window"] = row.gamma_in_window;
    o["d_trend_spearman"] = row.d_trend;
    o["verdict"] = to_string(row.verdict);
    o["low_confidence"] = row.low_confidence;
    ojson cells = ojson::array();
    for (const auto& c : row.cells) cells.push_back(cell_obj(c));
    o["cells"] = cells;
    rows.push_back(o);
  }
  j["rows"] = rows;
  if (r.bracket)
    j["crossover_bracket"] = {r.bracket->first, r.bracket->second};
  else
    j["crossover_bracket"] = nullptr;
  return j.dump(2) + "\n";
}

std::string cells_csv(const ScanReport& r) {
  std::ostringstream os;
  os << "beta,n,t,d_p,d_p_se,chi_hat,var_ratio,block_var_ratio,gamma_hat,speed\n";
  for (const auto& row : r.rows)
    for (const auto& c : row.cells)
      for (std::size_t i = 0; i < c.t.size(); ++i)
        os << num(row.beta) << ',' << c.n << ',' << num(c.t[i]) << ',' << num(c.d_p[i]) << ',' << num(c.d_p_se[i])
           << ',' << num(c.hyp.chi_hat) << ',' << num(c.hyp.var_ratio) << ',' << num(c.hyp.block_var_ratio) << ','
           << num(row.gamma_hat) << ',' << num(c.speed) << '\n';
  return os.str();
}

std::string paths_csv_header() { return "beta,n,path,t,x,y\n"; }

std::string paths_csv_rows(double beta, std::size_t n, const std::vector<PathProcess>& paths) {
  std::ostringstream os;
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& w = paths[p];
    for (std::size_t k = 0; k <= w.n; ++k) {
      os << num(beta) << ',' << n << ',' << p << ',' << num(static_cast<double>(k) / static_cast<double>(w.n));
      for (int d = 0; d < w.dim; ++d) os << ',' << num(w.nodes[k * static_cast<std::size_t>(w.dim) + d]);
      if (w.dim == 1) os << ',';
      os << '\n';
    }
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string config_json(const ScanConfig& cfg) { return config_obj(cfg).dump(2) + "\n"; }

void apply_json_config(ScanConfig& cfg, const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("JSON config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "alpha") cfg.alpha = v.get<double>();
      else if (key == "sign") cfg.sign = parse_sign(v.get<std::string>());
      else if (key == "beta_grid") cfg.beta_grid = v.get<std::vector<double>>();
      else if (key == "n_grid") cfg.n_grid = v.get<std::vector<std::size_t>>();
      else if (key == "t_grid") cfg.t_grid = v.get<std::vector<double>>();
      else if (key == "p") cfg.p = v.get<double>();
      else if (key == "replicas") cfg.replicas = v.get<std::size_t>();
      else if (key == "samples_per_replica") cfg.samples_per_replica = v.get<int>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "algorithm") cfg.algorithm = parse_algorithm(v.get<std::string>());
      else if (key == "burn_in_sweeps") cfg.burn_in_sweeps = v.get<int>();
      else if (key == "thinning_sweeps") cfg.thinning_sweeps = v.get<int>();
      else if (key == "auto_thinning") cfg.auto_thinning = v.get<bool>();
      else if (key == "pilot_sweeps") cfg.pilot_sweeps = v.get<int>();
      else if (key == "block_delta") cfg.block_delta = v.get<double>();
      else if (key == "jackknife_groups") cfg.jackknife_groups = v.get<int>();
      else if (key == "ref_samples") cfg.ref_samples = v.get<std::size_t>();
      else if (key == "output") cfg.output = v.get<std::string>();
      else if (key == "csv_output") cfg.csv_output = v.get<std::string>();
      else if (key == "paths_output") cfg.paths_output = v.get<std::string>();
      else if (key == "verbose") cfg.verbose = v.get<bool>();
      else if (key == "thresholds") {
        auto& t = cfg.thresholds;
        for (const auto& [k2, w] : v.items()) {
          if (k2 == "spearman") t.spearman = w.get<double>();
          else if (k2 == "gamma_diffusive") t.gamma_diffusive = w.get<double>();
          else if (k2 == "gamma_ballistic") t.gamma_ballistic = w.get<double>();
          else if (k2 == "speed_sq_min") t.speed_sq_min = w.get<double>();
          else if (k2 == "speed_se_factor") t.speed_se_factor = w.get<double>();
          else if (k2 == "gamma_window_lo") t.gamma_window_lo = w.get<double>();
          else if (k2 == "gamma_window_hi") t.gamma_window_hi = w.get<double>();
          else throw ValidationError("unknown threshold key '" + k2 + "'");
        }
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace polyscale
