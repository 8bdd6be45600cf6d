// Batch CLI: training signals, the three experiment tasks, classification of a
// trajectory file, bias sweeps of a saved model, and plots of CSV outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "confab/harness.hpp"
#include "confab/plot.hpp"

namespace fs = std::filesystem;
using namespace confab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  int threads = 1;
  bool long_transient = false;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON configuration or run manifest")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Base seed");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--long-transient", c.long_transient, "Long settling budget for fine sweeps");
  cmd->add_flag("--no-plots", c.no_plots, "CSV only");
}

TaskSpec make_spec(TaskKind kind, const Common& c, double b, int n_attractors) {
  TaskSpec s = c.config.empty() ? TaskSpec::defaults(kind, b, n_attractors) : load_task_spec(c.config, kind);
  if (c.seed) s.base_seed = *c.seed;
  s.out_dir = c.out;
  s.threads = c.threads;
  s.long_transient = s.long_transient || c.long_transient;
  if (c.no_plots) s.plots = false;
  return s;
}

void print_reconstructions(const BiasTaskResult& r) {
  for (const auto& rec : r.reconstructions)
    std::cout << "attractor " << rec.attractor_id << " " << rec.source << " b=" << rec.b << ": "
              << to_string(rec.c1.cls) << " period " << rec.signature.period << " (expected "
              << rec.expected_period << ")" << (rec.reconstructed ? " reconstructed" : " NOT reconstructed") << '\n';
  std::cout << r.branches.size() << " branches\n";
}

int run(int argc, char** argv) {
  CLI::App app{"confab: reservoir attractor reconstruction, classification and continuation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  Common common;

  auto* gen = app.add_subcommand("gen-data", "Write a ground-truth training signal as CSV");
  std::string system = "lorenz";
  double sprott_a = 27.0;
  bool overlap_shift = false;
  add_common(gen, common);
  gen->add_option("--system", system, "lorenz, sprott or halvorsen")->capture_default_str();
  gen->add_option("--a", sprott_a, "Sprott parameter a")->capture_default_str();
  gen->add_flag("--overlap-shift", overlap_shift, "Shift Halvorsen onto the Lorenz centroid");

  double b = 0.0;
  int n_attractors = 0;
  auto* t1 = app.add_subcommand("task1", "Scenario ensemble over rho");
  add_common(t1, common);
  auto* t2 = app.add_subcommand("task2", "Parameter-aware Sprott limit cycles and b sweep");
  add_common(t2, common);
  t2->add_option("--b", b, "Bias magnitude of the trained pair");
  t2->add_option("--attractors", n_attractors, "3 or 5 for the multi-attractor variants");
  auto* t3 = app.add_subcommand("task3", "Lorenz / Halvorsen gap filling and b sweep");
  add_common(t3, common);
  t3->add_option("--b", b, "Bias magnitude of the trained pair");

  auto* cls = app.add_subcommand("classify", "Classify a projected trajectory CSV against the Lorenz reference");
  std::string input;
  double skip = 0.0;
  add_common(cls, common);
  cls->add_option("--input", input, "Trajectory CSV (t,x1,x2,x3)")->required()->check(CLI::ExistingFile);
  cls->add_option("--skip", skip, "Model units discarded from the start")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Warm-started bias sweep of a saved model");
  std::string model_path;
  double start = -0.42, stop = 0.42, step = 0.002;
  Index coord = 1;
  std::string kind = "minima";
  add_common(sw, common);
  sw->add_option("--model", model_path, "model.json written by task2/task3")->required()->check(CLI::ExistingFile);
  sw->add_option("--start", start)->capture_default_str();
  sw->add_option("--stop", stop)->capture_default_str();
  sw->add_option("--step", step)->capture_default_str();
  sw->add_option("--coord", coord, "Coordinate index of the extrema")->capture_default_str();
  sw->add_option("--kind", kind, "maxima or minima")->capture_default_str();

  auto* pl = app.add_subcommand("plot", "SVG from a branches.csv or ensemble.csv");
  std::string plot_out;
  pl->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
  pl->add_option("--out", plot_out, "SVG path (default: input with .svg)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (gen->parsed()) {
    RCConfig cfg = RCConfig::task1();
    if (!common.config.empty()) update_from_json(read_json_file(common.config).value("rc", nlohmann::json::object()), cfg);
    cfg.validate();
    SourceSystem sys;
    switch (system_kind_from_string(system)) {
      case SystemKind::lorenz: sys = SourceSystem::lorenz(); break;
      case SystemKind::sprott: sys = SourceSystem::sprott(sprott_a); break;
      case SystemKind::halvorsen:
        sys = SourceSystem::halvorsen(overlap_shift ? halvorsen_overlap_shift(cfg.tau) : Vec3::Zero());
        break;
    }
    const TrainingSignal sig = generate_training_signal(sys, cfg, common.seed.value_or(0));
    fs::create_directories(common.out);
    const auto path = (fs::path(common.out) / (sys.name() + ".csv")).string();
    write_trajectory_csv(path, sig.trajectory);
    std::cout << path << '\n';
    return 0;
  }
  if (t1->parsed()) {
    const TaskSpec spec = make_spec(TaskKind::task1, common, 0.0, 3);
    const Task1Result res = run_task1(spec);
    write_task1_outputs(spec, res);
    const auto table = res.ensemble.table();
    for (std::size_t k = 0; k < table.size(); ++k) {
      std::cout << "rho=" << format_double(res.ensemble.rho_grid[k]);
      for (int c : table[k]) std::cout << ' ' << c;
      std::cout << '\n';
    }
    return 0;
  }
  if (t2->parsed()) {
    const TaskKind k = n_attractors > 0 ? TaskKind::task2_multi : TaskKind::task2;
    const TaskSpec spec = make_spec(k, common, b, n_attractors > 0 ? n_attractors : 3);
    const BiasTaskResult res = run_task2(spec);
    write_bias_task_outputs(spec, res);
    print_reconstructions(res);
    return 0;
  }
  if (t3->parsed()) {
    const TaskSpec spec = make_spec(TaskKind::task3, common, b, 3);
    const BiasTaskResult res = run_task3(spec);
    write_bias_task_outputs(spec, res);
    print_reconstructions(res);
    std::cout << "outcome: " << to_string(res.gap->outcome);
    if (res.gap->outcome == GapOutcome::bistability)
      std::cout << " [" << res.gap->window_lo << ", " << res.gap->window_hi << "]";
    std::cout << '\n';
    return 0;
  }
  if (cls->parsed()) {
    RCConfig cfg = RCConfig::task1();
    if (!common.config.empty()) update_from_json(read_json_file(common.config).value("rc", nlohmann::json::object()), cfg);
    const GroundTruth gt = lorenz_ground_truth(cfg);
    const Trajectory traj = read_trajectory_csv(input).tail_from(skip);
    const ClassLabel label = classify_output(traj, gt.ref);
    const ExtremaSignature sig = make_signature(traj, {label.c1, label.period});
    fs::create_directories(common.out);
    auto os = open_output((fs::path(common.out) / "classification_report.csv").string());
    write_classification_report(os, {{fs::path(input).stem().string(), 0, label, signature_hash(sig)}});
    std::cout << to_string(label.value) << '\n';
    return 0;
  }
  if (sw->parsed()) {
    const Model model = load_model(model_path);
    if (!model.has_readout) throw ConfigError(model_path + " holds no readout");
    RCConfig cfg = model.config;
    const auto states = draw_initial_states(cfg.N, 1, ic_seed_base(common.seed.value_or(1)));
    SweepPlan plan;
    plan.start = start;
    plan.stop = stop;
    plan.step = step;
    plan.tau = cfg.tau;
    plan.coord = coord;
    plan.kind = extremum_kind_from_string(kind);
    if (common.long_transient) plan.t_settle = 3000.0;
    const auto branches = sweep_branch(bias_family(model.network, model.readout, cfg), plan, states.front());
    const auto rows = emit_bifurcation_data(branches, plan.coord, plan.kind);
    fs::create_directories(common.out);
    {
      auto os = open_output((fs::path(common.out) / "branches.csv").string());
      write_branches_csv(os, rows);
    }
    if (!common.no_plots) {
      auto os = open_output((fs::path(common.out) / "branches.svg").string());
      write_branches_svg(os, rows, {"bias sweep", "b", "extrema"});
    }
    std::cout << branches.size() << " branches, " << rows.size() << " rows\n";
    return 0;
  }
  if (pl->parsed()) {
    if (plot_out.empty()) plot_out = fs::path(input).replace_extension(".svg").string();
    std::ifstream is(input);
    std::string header;
    std::getline(is, header);
    is.seekg(0);
    auto os = open_output(plot_out);
    if (header.rfind("param,", 0) == 0) {
      write_branches_svg(os, read_branches_csv(is), {fs::path(input).stem().string(), "parameter", "extrema"});
    } else if (header.rfind("rho,scenario1", 0) == 0) {
      EnsembleResult er;
      std::string line;
      std::getline(is, line);
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::getline(ss, f, ',');
        er.rho_grid.push_back(std::stod(f));
        for (int s = 1; s <= 5; ++s) {
          std::getline(ss, f, ',');
          for (int n = std::stoi(f); n > 0; --n) {
            EnsembleCell c;
            c.rho_index = er.rho_grid.size() - 1;
            c.scenario = s;
            er.cells.push_back(c);
          }
        }
      }
      write_ensemble_svg(os, er, {"Scenario frequency", "rho", "matrices"});
    } else {
      throw ConfigError(input + ": not a branches or ensemble CSV");
    }
    std::cout << plot_out << '\n';
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const DivergenceError& e) {
    spdlog::error("numerical abort: {}", e.what());
    return kExitNumerical;
  } catch (const SingularSystemError& e) {
    spdlog::error("numerical abort: {} (rank {} of {}; use beta > 0)", e.what(), e.rank(), e.dim());
    return kExitNumerical;
  } catch (const EigenSolveError& e) {
    spdlog::error("numerical abort: {}", e.what());
    return kExitNumerical;
  } catch (const GenerationError& e) {
    spdlog::error("numerical abort: {}", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}
