#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "confab/io.hpp"
#include "confab/plot.hpp"

using namespace confab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "confab_test_io";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("doubles print with round-trip precision") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("model file reloads bit-exactly") {
  RCConfig c = RCConfig::task2();
  c.N = 20;
  c.seeds.network_seed = 77;
  const Network net = build_network(c);
  Readout ro;
  ro.W_out = Mat::Random(3, 40);
  ro.provenance = ReadoutProvenance::parameter_aware;
  ro.segments = {{1, "sprott(a=17)", 0.4}, {2, "sprott(a=27)", -0.4}};
  const auto path = (scratch_dir() / "model.json").string();
  save_model(path, c, net, &ro);
  const Model m = load_model(path);
  CHECK(m.network.M == net.M);
  CHECK(m.network.W_in == net.W_in);
  CHECK(m.network.rho_actual == net.rho_actual);
  CHECK(m.config.seeds.network_seed == 77);
  CHECK(m.config.rho == c.rho);
  REQUIRE(m.has_readout);
  CHECK(m.readout.W_out == ro.W_out);
  CHECK(m.readout.provenance == ReadoutProvenance::parameter_aware);
  REQUIRE(m.readout.segments.size() == 2);
  CHECK(m.readout.segments[1].source == "sprott(a=27)");
  CHECK(m.readout.segments[1].bias_level == -0.4);

  save_model(path, c, net);
  CHECK_FALSE(load_model(path).has_readout);
}

TEST_CASE("malformed files are configuration errors") {
  const auto path = (scratch_dir() / "broken.json").string();
  {
    auto os = open_output(path);
    os << "{ not json";
  }
  CHECK_THROWS_AS(read_json_file(path), ConfigError);
  CHECK_THROWS_AS(read_json_file((scratch_dir() / "missing.json").string()), ConfigError);
  nlohmann::json ragged = {{"rows", 2}, {"cols", 2}, {"data", {{1.0, 2.0}, {3.0}}}};
  CHECK_THROWS_AS(matrix_from_json(ragged), ConfigError);
}

TEST_CASE("branch csv round-trips") {
  const std::vector<BifurcationRow> rows{{-0.42, -1.0999999999999999, 0, "GA", ExtremumKind::minima, 1},
                                         {0.1, 3.25, 2, "UA", ExtremumKind::minima, 1}};
  std::stringstream ss;
  write_branches_csv(ss, rows);
  CHECK(ss.str().rfind("param,value,branch_id,label,kind,coord\n", 0) == 0);
  const auto back = read_branches_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].param == rows[0].param);
  CHECK(back[0].value == rows[0].value);
  CHECK(back[1].branch_id == 2);
  CHECK(back[1].label == "UA");
  CHECK(back[1].kind == ExtremumKind::minima);
  CHECK(back[1].coord == 1);
}

TEST_CASE("ensemble tables and reports") {
  EnsembleResult r;
  r.rho_grid = {0.0, 0.5};
  for (int m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < 2; ++k) {
      EnsembleCell c;
      c.matrix_id = m;
      c.rho_index = k;
      c.rho = r.rho_grid[k];
      c.scenario = k == 0 ? 3 : (m == 0 ? 1 : 4);
      ClassLabel l;
      l.value = Label::ua_preliminary;
      c.ic_labels = {l};
      c.ic_hashes = {0xabcULL};
      r.cells.push_back(c);
    }
  }
  r.cells.back().scenario = 0;  // failed cell is not counted
  std::stringstream e;
  write_ensemble_csv(e, r);
  CHECK(e.str() == "rho,scenario1,scenario2,scenario3,scenario4,scenario5\n0,0,0,2,0,0\n0.5,1,0,0,0,0\n");

  std::stringstream m;
  write_scenario_map_csv(m, r);
  CHECK(m.str().rfind("matrix_id,rho,scenario\n0,0,3\n", 0) == 0);

  std::stringstream rep;
  write_classification_report(rep, ensemble_report_rows(r));
  std::string header;
  std::getline(rep, header);
  CHECK(header == "run_id,ic_index,label,c1,c2,c3,max_c3_distance,signature_hash");
  std::string first;
  std::getline(rep, first);
  CHECK(first.rfind("m0_rho0,0,UA_preliminary,", 0) == 0);
  CHECK(first.find("0000000000000abc") != std::string::npos);
}

TEST_CASE("svg output has one layer per label") {
  const std::vector<BifurcationRow> rows{{0.0, 1.0, 0, "GA", ExtremumKind::minima, 1},
                                         {0.1, 1.1, 0, "GA", ExtremumKind::minima, 1},
                                         {0.1, 2.0, 1, "UA", ExtremumKind::minima, 1}};
  std::stringstream ss;
  write_branches_svg(ss, rows, {"t", "b", "x2 minima"});
  const std::string svg = ss.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("data-label=\"GA\"") != std::string::npos);
  CHECK(svg.find("data-label=\"UA\"") != std::string::npos);
  std::stringstream empty;
  write_branches_svg(empty, {}, {"t", "b", "x"});
  CHECK(empty.str().find("</svg>") != std::string::npos);
}
