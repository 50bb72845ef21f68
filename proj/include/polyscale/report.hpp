#pragma once

#include <string>
#include <vector>

#include "polyscale/scan.hpp"

namespace polyscale {

/// Deterministic JSON: fixed key order, round-trip double formatting.
std::string report_json(const ScanReport& r);
std::string cell_json(const CellReport& c);

/// One row per (beta, n, t): beta,n,t,d_p,d_p_se,chi_hat,var_ratio,block_var_ratio,gamma_hat,speed
std::string cells_csv(const ScanReport& r);

/// beta,n,path,t,x,y at every node of each path.
std::string paths_csv_header();
std::string paths_csv_rows(double beta, std::size_t n, const std::vector<PathProcess>& paths);

void write_text_file(const std::string& path, const std::string& text);

/// Overwrites the fields present in a JSON object; unknown keys are rejected.
void apply_json_config(ScanConfig& cfg, const std::string& json_text);
std::string config_json(const ScanConfig& cfg);

}  // namespace polyscale
