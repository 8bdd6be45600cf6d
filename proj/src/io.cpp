#include "confab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace confab {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Mat matrix_from_json(const json& j) {
  const auto r = j.at("rows").get<Index>();
  const auto c = j.at("cols").get<Index>();
  const json& data = j.at("data");
  if (static_cast<Index>(data.size()) != r) throw ConfigError("matrix: row count does not match data");
  Mat m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = data.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != c) throw ConfigError("matrix: ragged row " + std::to_string(i));
    for (Index k = 0; k < c; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

json network_to_json(const Network& net, const RCConfig& config) {
  json cfg;
  to_json(cfg, config);
  return {{"config", cfg},
          {"m_seed", net.m_seed},
          {"rho_actual", net.rho_actual},
          {"M", matrix_to_json(net.M)},
          {"W_in", matrix_to_json(net.W_in)}};
}

Network network_from_json(const json& j) {
  Network net;
  net.M = matrix_from_json(j.at("M"));
  net.W_in = matrix_from_json(j.at("W_in"));
  net.rho_actual = j.at("rho_actual").get<double>();
  net.m_seed = j.value("m_seed", std::uint64_t{0});
  if (net.M.rows() != net.M.cols() || net.W_in.rows() != net.M.rows())
    throw ConfigError("network: inconsistent matrix shapes");
  return net;
}

json readout_to_json(const Readout& readout) {
  json segs = json::array();
  for (const auto& s : readout.segments)
    segs.push_back({{"attractor_id", s.attractor_id}, {"source", s.source}, {"bias_level", s.bias_level}});
  return {{"provenance", readout.provenance == ReadoutProvenance::single ? "single" : "parameter_aware"},
          {"segments", segs},
          {"W_out", matrix_to_json(readout.W_out)}};
}

Readout readout_from_json(const json& j) {
  Readout r;
  r.W_out = matrix_from_json(j.at("W_out"));
  const auto prov = j.at("provenance").get<std::string>();
  if (prov == "single")
    r.provenance = ReadoutProvenance::single;
  else if (prov == "parameter_aware")
    r.provenance = ReadoutProvenance::parameter_aware;
  else
    throw ConfigError("readout: unknown provenance '" + prov + "'");
  for (const auto& s : j.at("segments"))
    r.segments.push_back(
        {s.at("attractor_id").get<int>(), s.at("source").get<std::string>(), s.at("bias_level").get<double>()});
  return r;
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  return os;
}

void write_json_file(const std::string& path, const json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

void save_model(const std::string& path, const RCConfig& config, const Network& net, const Readout* readout) {
  json j = {{"network", network_to_json(net, config)}};
  if (readout) j["readout"] = readout_to_json(*readout);
  write_json_file(path, j);
}

Model load_model(const std::string& path) {
  const json j = read_json_file(path);
  Model m;
  try {
    update_from_json(j.at("network").at("config"), m.config);
    m.network = network_from_json(j.at("network"));
    if (j.contains("readout")) {
      m.readout = readout_from_json(j.at("readout"));
      m.has_readout = true;
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return m;
}

void write_branches_csv(std::ostream& os, const std::vector<BifurcationRow>& rows) {
  os << "param,value,branch_id,label,kind,coord\n";
  for (const auto& r : rows)
    os << format_double(r.param) << ',' << format_double(r.value) << ',' << r.branch_id << ',' << r.label << ','
       << to_string(r.kind) << ',' << r.coord << '\n';
}

std::vector<BifurcationRow> read_branches_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "param,value,branch_id,label,kind,coord")
    throw ConfigError("branch CSV: unexpected header");
  std::vector<BifurcationRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[6];
    for (auto& s : f) std::getline(ss, s, ',');
    try {
      rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stoi(f[2]), f[3], extremum_kind_from_string(f[4]),
                      static_cast<Index>(std::stol(f[5]))});
    } catch (const std::logic_error&) {
      throw ConfigError("branch CSV: malformed row '" + line + "'");
    }
  }
  return rows;
}

void write_ensemble_csv(std::ostream& os, const EnsembleResult& result) {
  os << "rho,scenario1,scenario2,scenario3,scenario4,scenario5\n";
  const auto table = result.table();
  for (std::size_t k = 0; k < table.size(); ++k) {
    os << format_double(result.rho_grid[k]);
    for (int c : table[k]) os << ',' << c;
    os << '\n';
  }
}

void write_scenario_map_csv(std::ostream& os, const EnsembleResult& result) {
  os << "matrix_id,rho,scenario\n";
  for (const auto& c : result.cells) os << c.matrix_id << ',' << format_double(c.rho) << ',' << c.scenario << '\n';
}

void write_classification_report(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "run_id,ic_index,label,c1,c2,c3,max_c3_distance,signature_hash\n";
  char hash[24];
  for (const auto& r : rows) {
    std::snprintf(hash, sizeof hash, "%016" PRIx64, r.signature_hash);
    os << r.run_id << ',' << r.ic_index << ',' << to_string(r.label.value) << ',' << to_string(r.label.c1) << ','
       << (r.label.c2 ? 1 : 0) << ',' << (r.label.c3 ? 1 : 0) << ',' << format_double(r.label.max_c3_distance)
       << ',' << hash << '\n';
  }
}

std::vector<ReportRow> ensemble_report_rows(const EnsembleResult& result) {
  std::vector<ReportRow> rows;
  for (const auto& c : result.cells) {
    const std::string id = "m" + std::to_string(c.matrix_id) + "_rho" + format_double(c.rho);
    for (std::size_t j = 0; j < c.ic_labels.size(); ++j) rows.push_back({id, j, c.ic_labels[j], c.ic_hashes[j]});
  }
  return rows;
}

}  // namespace confab
