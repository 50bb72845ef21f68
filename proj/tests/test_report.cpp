#include <string>

#include "doctest.h"
#include "json.hpp"
#include "polyscale/report.hpp"

using namespace polyscale;

TEST_CASE("JSON config overrides and rejects unknown keys") {
  ScanConfig c;
  apply_json_config(c, R"({"alpha": 1.2, "beta_grid": [0, 0.5], "n_grid": [16, 32, 64],
                           "thresholds": {"spearman": 0.7}, "algorithm": "heatbath"})");
  CHECK(c.alpha == 1.2);
  CHECK(c.beta_grid == std::vector<double>{0, 0.5});
  CHECK(c.n_grid == std::vector<std::size_t>{16, 32, 64});
  CHECK(c.thresholds.spearman == 0.7);
  CHECK(c.algorithm == Algorithm::Heatbath);
  CHECK_THROWS_AS(apply_json_config(c, R"({"alpha": "x"})"), ValidationError);
  CHECK_THROWS_AS(apply_json_config(c, R"({"unknown": 1})"), ValidationError);
  CHECK_THROWS_AS(apply_json_config(c, R"({"thresholds": {"nope": 1}})"), ValidationError);
  CHECK_THROWS_AS(apply_json_config(c, "[1, 2]"), ValidationError);
  CHECK_THROWS_AS(apply_json_config(c, "{"), ValidationError);
}

TEST_CASE("config round trip") {
  ScanConfig c;
  c.beta_grid = {0.1};
  c.n_grid = {10, 20, 40};
  c.seed = 77;
  ScanConfig d;
  auto j = nlohmann::json::parse(config_json(c));
  apply_json_config(d, j.dump());
  CHECK(config_json(d) == config_json(c));
}

TEST_CASE("report JSON and CSV layout") {
  ScanReport r;
  r.config.beta_grid = {0.0};
  r.config.n_grid = {8};
  BetaRow row;
  row.beta = 0.0;
  row.gamma_hat = 0.5;
  CellReport cell;
  cell.n = 8;
  cell.t = {0.5, 1.0};
  cell.d_p = {0.1, 0.2};
  cell.d_p_se = {0.01, 0.02};
  cell.hyp.chi_hat = 1.0 / 3.0;
  row.cells.push_back(cell);
  r.rows.push_back(row);
  const auto text = report_json(r);
  CHECK(text.back() == '\n');
  const auto j = nlohmann::json::parse(text);
  CHECK(j["rows"][0]["cells"][0]["d_p"][1]["d_p"] == 0.2);
  CHECK(j["rows"][0]["cells"][0]["hypotheses"]["chi_hat"].get<double>() == 1.0 / 3.0);
  CHECK(j["crossover_bracket"].is_null());
  r.bracket = std::pair{0.1, 0.2};
  CHECK(nlohmann::json::parse(report_json(r))["crossover_bracket"][1] == 0.2);
  const auto csv = cells_csv(r);
  CHECK(csv ==
        "beta,n,t,d_p,d_p_se,chi_hat,var_ratio,block_var_ratio,gamma_hat,speed\n"
        "0,8,0.5,0.10000000000000001,0.01,0.33333333333333331,0,0,0.5,0\n"
        "0,8,1,0.20000000000000001,0.02,0.33333333333333331,0,0,0.5,0\n");
}

TEST_CASE("path CSV rows") {
  const Polymer p({Step::PlusE1, Step::PlusE2});
  const std::vector<PathProcess> paths{build_w_path(p, 1.0)};
  const auto rows = paths_csv_rows(0.5, 2, paths);
  CHECK(rows.substr(0, rows.find('\n')) == "0.5,2,0,0,0,0");
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
}
