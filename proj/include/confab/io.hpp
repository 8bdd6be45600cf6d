#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confab/continuation.hpp"

namespace confab {

/// %.17g, enough to round-trip any double.
std::string format_double(double v);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

/// Config echo, seeds, dense M and W_in, rho_actual.
nlohmann::json network_to_json(const Network& net, const RCConfig& config);
Network network_from_json(const nlohmann::json& j);
nlohmann::json readout_to_json(const Readout& readout);
Readout readout_from_json(const nlohmann::json& j);

/// One file holding config, network and (optionally) readout.
void save_model(const std::string& path, const RCConfig& config, const Network& net, const Readout* readout = nullptr);
struct Model {
  RCConfig config;
  Network network;
  bool has_readout = false;
  Readout readout;
};
Model load_model(const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// param,value,branch_id,label,kind,coord
void write_branches_csv(std::ostream& os, const std::vector<BifurcationRow>& rows);
std::vector<BifurcationRow> read_branches_csv(std::istream& is);

/// rho,scenario1..scenario5
void write_ensemble_csv(std::ostream& os, const EnsembleResult& result);
/// matrix_id,rho,scenario (0 for a failed cell)
void write_scenario_map_csv(std::ostream& os, const EnsembleResult& result);

struct ReportRow {
  std::string run_id;
  std::size_t ic_index = 0;
  ClassLabel label;
  std::uint64_t signature_hash = 0;
};

/// run_id,ic_index,label,c1,c2,c3,max_c3_distance,signature_hash
void write_classification_report(std::ostream& os, const std::vector<ReportRow>& rows);
std::vector<ReportRow> ensemble_report_rows(const EnsembleResult& result);

/// Opens `path` for writing or throws Error.
std::ofstream open_output(const std::string& path);

}  // namespace confab
