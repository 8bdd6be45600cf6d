#include "confab/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "confab/plot.hpp"

namespace confab {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::task1: return "task1";
    case TaskKind::task2: return "task2";
    case TaskKind::task2_multi: return "task2_multi";
    case TaskKind::task3: return "task3";
  }
  return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
  for (auto k : {TaskKind::task1, TaskKind::task2, TaskKind::task2_multi, TaskKind::task3})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown task '" + s + "'");
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

// Sprott parameter used for a training bias in the multi-attractor variants:
// linear between a = 27 at b = -0.2 and a = 17 at b = +0.2.
double sprott_a_for_bias(double b) { return 22.0 - 25.0 * b; }

}  // namespace

TaskSpec TaskSpec::defaults(TaskKind kind, double b, int n_attractors) {
  TaskSpec s;
  s.task = kind;
  switch (kind) {
    case TaskKind::task1:
      s.config = RCConfig::task1();
      s.rho_grid = grid(0.0, 1.0, 0.05);
      break;
    case TaskKind::task2:
      s.config = RCConfig::task2();
      if (b == 0.0) b = s.config.b;
      s.config.b = b;
      s.attractors = {{SourceSystem::sprott(17.0), b}, {SourceSystem::sprott(27.0), -b}};
      break;
    case TaskKind::task2_multi: {
      s.config = RCConfig::task2();
      s.config.b = 0.2;
      std::vector<double> bs;
      if (n_attractors == 5) {
        s.config.rho = 1.3;
        s.config.sigma = 1.0;
        s.config.beta = 0.1;
        bs = {-0.2, -0.1, 0.0, 0.1, 0.2};
      } else if (n_attractors == 3) {
        s.config.rho = 1.4;
        s.config.sigma = 1.3;
        bs = {-0.2, 0.0, 0.2};
      } else {
        throw ConfigError("task2_multi supports 3 or 5 attractors");
      }
      for (double bk : bs) s.attractors.push_back({SourceSystem::sprott(sprott_a_for_bias(bk)), bk});
      break;
    }
    case TaskKind::task3:
      s.config = RCConfig::task3();
      if (b == 0.0) b = s.config.b;
      s.config.b = b;
      s.attractors = {{SourceSystem::lorenz(), b}, {SourceSystem::halvorsen(halvorsen_overlap_shift(s.config.tau)), -b}};
      break;
  }
  return s;
}

void TaskSpec::validate() const {
  config.validate();
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (task == TaskKind::task1) {
    if (rho_grid.empty()) throw ConfigError("task1 needs a non-empty rho grid");
    for (double r : rho_grid)
      if (!(r >= 0.0)) throw ConfigError("rho values must be non-negative");
    if (n_matrices < 1) throw ConfigError("n_matrices must be at least 1");
    if (n_ic < 1) throw ConfigError("n_ic must be at least 1");
    if (fine_sweep && (fine_matrix < 0 || fine_matrix >= n_matrices))
      throw ConfigError("fine_matrix must index one of the ensemble matrices");
    if (fine_sweep && !(fine_rho_step > 0.0 && fine_rho_hi > fine_rho_lo))
      throw ConfigError("fine rho sweep needs lo < hi and a positive step");
    return;
  }
  if (attractors.empty()) throw ConfigError("the list of trained attractors (b values) is empty");
  if (seed_attempts < 1) throw ConfigError("seed_attempts must be at least 1");
  if (!(confirm_time >= 0.0)) throw ConfigError("confirm_time must be non-negative");
  if (!(sweep_step > 0.0) || !(sweep_hi > sweep_lo)) throw ConfigError("sweep needs lo < hi and a positive step");
  if (!(t_settle >= 0.0) || !(t_measure >= 30.0)) throw ConfigError("t_measure must cover the 30-unit classification window");
  if (config.t_predict - config.t_trans < 30.0) throw ConfigError("t_predict - t_trans must be at least 30");
}

json to_json(const TaskSpec& s) {
  json rc;
  to_json(rc, s.config);
  json atts = json::array();
  for (const auto& a : s.attractors)
    atts.push_back({{"system", to_string(a.system.kind)},
                    {"a", a.system.a},
                    {"shift", {a.system.shift(0), a.system.shift(1), a.system.shift(2)}},
                    {"b", a.b}});
  return {{"task", to_string(s.task)},
          {"base_seed", s.base_seed},
          {"threads", s.threads},
          {"long_transient", s.long_transient},
          {"plots", s.plots},
          {"rc", rc},
          {"task1",
           {{"rho_grid", s.rho_grid},
            {"n_matrices", s.n_matrices},
            {"n_ic", s.n_ic},
            {"include_warm_start", s.include_warm_start},
            {"fine_sweep", s.fine_sweep},
            {"fine_matrix", s.fine_matrix},
            {"fine_rho", {s.fine_rho_lo, s.fine_rho_hi, s.fine_rho_step}}}},
          {"attractors", atts},
          {"sweep",
           {{"lo", s.sweep_lo},
            {"hi", s.sweep_hi},
            {"step", s.sweep_step},
            {"t_settle", s.t_settle},
            {"t_measure", s.t_measure},
            {"track_uas", s.track_uas},
            {"n_ic_ua", s.n_ic_ua},
            {"max_ua_tracks", s.max_ua_tracks}}},
          {"screening", {{"seed_attempts", s.seed_attempts}, {"confirm_time", s.confirm_time}}}};
}

void update_from_json(const json& j_in, TaskSpec& s) {
  const json& j = j_in.contains("spec") ? j_in.at("spec") : j_in;
  try {
    auto get = [](const json& o, const char* key, auto& field) {
      if (o.contains(key)) field = o.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("task")) s.task = task_kind_from_string(j.at("task").get<std::string>());
    get(j, "base_seed", s.base_seed);
    get(j, "threads", s.threads);
    get(j, "long_transient", s.long_transient);
    get(j, "plots", s.plots);
    if (j.contains("rc")) update_from_json(j.at("rc"), s.config);
    if (j.contains("task1")) {
      const json& t = j.at("task1");
      get(t, "rho_grid", s.rho_grid);
      get(t, "n_matrices", s.n_matrices);
      get(t, "n_ic", s.n_ic);
      get(t, "include_warm_start", s.include_warm_start);
      get(t, "fine_sweep", s.fine_sweep);
      get(t, "fine_matrix", s.fine_matrix);
      if (t.contains("fine_rho")) {
        const auto v = t.at("fine_rho").get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("task1.fine_rho must be [lo, hi, step]");
        s.fine_rho_lo = v[0], s.fine_rho_hi = v[1], s.fine_rho_step = v[2];
      }
    }
    if (j.contains("attractors")) {
      s.attractors.clear();
      for (const auto& a : j.at("attractors")) {
        TrainedAttractor t;
        t.system.kind = system_kind_from_string(a.at("system").get<std::string>());
        t.system.a = a.value("a", t.system.kind == SystemKind::sprott ? 27.0 : 0.0);
        if (a.contains("shift")) {
          const auto v = a.at("shift").get<std::vector<double>>();
          if (v.size() != 3) throw ConfigError("attractor shift must have 3 entries");
          t.system.shift = Vec3(v[0], v[1], v[2]);
        } else if (t.system.kind == SystemKind::halvorsen) {
          t.system.shift = halvorsen_overlap_shift(s.config.tau);
        }
        t.b = a.at("b").get<double>();
        s.attractors.push_back(t);
      }
    }
    if (j.contains("sweep")) {
      const json& w = j.at("sweep");
      get(w, "lo", s.sweep_lo);
      get(w, "hi", s.sweep_hi);
      get(w, "step", s.sweep_step);
      get(w, "t_settle", s.t_settle);
      get(w, "t_measure", s.t_measure);
      get(w, "track_uas", s.track_uas);
      get(w, "n_ic_ua", s.n_ic_ua);
      get(w, "max_ua_tracks", s.max_ua_tracks);
    }
    if (j.contains("screening")) {
      get(j.at("screening"), "seed_attempts", s.seed_attempts);
      get(j.at("screening"), "confirm_time", s.confirm_time);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad task configuration: ") + e.what());
  }
}

TaskSpec load_task_spec(const std::string& path, TaskKind fallback) {
  const json file = read_json_file(path);
  const json& j = file.contains("spec") ? file.at("spec") : file;
  TaskKind kind = fallback;
  try {
    if (j.contains("task")) kind = task_kind_from_string(j.at("task").get<std::string>());
    double b = 0.0;
    if (j.contains("rc") && j.at("rc").contains("b")) b = j.at("rc").at("b").get<double>();
    int n = 3;
    if (j.contains("attractors")) n = static_cast<int>(j.at("attractors").size());
    TaskSpec s = TaskSpec::defaults(kind, b, kind == TaskKind::task2_multi && n == 5 ? 5 : 3);
    update_from_json(j, s);
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json run_manifest(const TaskSpec& spec) {
  const ClassifierParams cp;
  json decisions = {
      {"integration", "classical RK4, fixed step tau"},
      {"tau", spec.config.tau},
      {"connection_probability", spec.config.P},
      {"drive_interpolation", "u linear between samples inside each RK4 step"},
      {"lorenz_first_component", "10 (x2 - x1), the standard dissipative form"},
      {"signal_transient", kSignalTransient},
      {"initial_states",
       {{"lorenz", {1.0, 1.0, 1.0}}, {"sprott", {0.05, -0.5, -1.2}}, {"halvorsen", {-5.0, 0.0, 0.0}}}},
      {"eps_fp", cp.eps_fp},
      {"eps_per", cp.eps_per},
      {"max_period", cp.max_period},
      {"min_window", cp.min_window},
      {"period_count", "minimal repeat of the extremum sequence at tol 1e-3 over at least 3 cycles"},
      {"c3_metric", "vertical distance in the (x1, x3) plane"},
      {"alpha", 3.75},
      {"box", {{-22.0, 22.0}, {-32.0, 32.0}, {0.0, 55.0}}},
      {"cluster_tol", 0.05},
      {"jump_tol", 0.5},
      {"loss_rule", "signature jump above jump_tol (aperiodic pairs: dedup extents/means test) persisting after one retry with doubled t_settle"},
      {"basin_ic_distribution", "uniform on [-1, 1]^N"},
      {"manual_review_in_scenarios", "counts as poor reconstruction if C3 holds, else as untrained attractor"},
      {"seed_schedule", "network_seed = base_seed + i, ic_seed = base_seed * 1e6 + j"}};
  if (spec.long_transient) decisions["long_transient"] = {{"t_predict", 30000.0}, {"t_settle", 3000.0}};
  return {{"artifact_version", kArtifactVersion},
          {"spec", to_json(spec)},
          {"decisions", decisions},
          {"created_utc", static_cast<std::int64_t>(std::time(nullptr))}};
}

Task1Result run_task1(const TaskSpec& spec) {
  spec.validate();
  Task1Result res;
  EnsembleSpec es;
  es.base = spec.config;
  es.rho_grid = spec.rho_grid;
  es.n_matrices = spec.n_matrices;
  es.base_seed = spec.base_seed;
  es.n_ic = spec.n_ic;
  es.include_warm_start = spec.include_warm_start;
  spdlog::info("task1: {} matrices x {} rho values, {} initial conditions each", es.n_matrices, es.rho_grid.size(),
               es.n_ic);
  res.ensemble = scenario_ensemble_parallel(es, spec.threads);

  if (spec.fine_sweep) {
    const EnsembleInputs in = prepare_ensemble(es);
    const auto m = static_cast<std::size_t>(spec.fine_matrix);
    const RCConfig base = spec.config;
    const Mat& raw = in.raw_M[m];
    FlowFamily family = [&](double rho) -> std::unique_ptr<Flow> {
      RCConfig cfg = base;
      cfg.rho = rho;
      const Network net = network_from_raw(raw, in.W_in, rho, in.m_seeds[m]);
      const SingleTraining tr = train_single(in.truth.signal, cfg, net);
      return std::make_unique<ReservoirFlow>(ClosedLoop(net, tr.readout, Vec::Zero(cfg.N), cfg.sigma, cfg.gamma));
    };
    RCConfig start = base;
    start.rho = spec.fine_rho_lo;
    const SingleTraining seed =
        train_single(in.truth.signal, start, network_from_raw(raw, in.W_in, start.rho, in.m_seeds[m]));
    SweepPlan plan;
    plan.parameter = "rho";
    plan.start = spec.fine_rho_lo;
    plan.stop = spec.fine_rho_hi;
    plan.step = spec.fine_rho_step;
    plan.t_settle = spec.long_transient ? 3000.0 : spec.t_settle;
    plan.t_measure = spec.t_measure;
    plan.tau = base.tau;
    plan.coord = 2;
    plan.kind = ExtremumKind::maxima;
    SweepOptions opts;
    const ReferenceFit ref = in.truth.ref;
    opts.labeler = [ref](const Trajectory& w, const C1Result&) { return to_string(classify_output(w, ref).value); };
    res.fine_branches = sweep_branch(family, plan, seed.warm_start, opts);
  }
  return res;
}

SignatureParams bias_task_signature(TaskKind kind) {
  SignatureParams sp;
  sp.kind = ExtremumKind::minima;
  sp.coord = kind == TaskKind::task3 ? 0 : 1;
  return sp;
}

namespace {

// Trains on spec.attractors with one network seed and checks each trained
// attractor at its bias: over the standard window and again after
// confirm_time more units, so that slow transients are not mistaken for it.
struct TrainedModel {
  Network net;
  Readout readout;
  double residual_rms = 0.0;
  std::vector<Reconstruction> reconstructions;
  bool all_reconstructed = true;
};

TrainedModel train_and_check(const TaskSpec& spec, RCConfig cfg, std::uint64_t network_seed) {
  TrainedModel m;
  cfg.seeds.network_seed = network_seed;
  m.net = build_network(cfg);
  std::vector<BiasedSource> sources;
  for (const auto& a : spec.attractors) sources.push_back({a.system, a.b});
  const ParameterAwareTraining pa = train_parameter_aware(sources, cfg, m.net);
  m.readout = pa.readout;
  m.residual_rms = pa.residual_rms;

  const SignatureParams sp = bias_task_signature(spec.task);
  const ClassifierParams cp;
  const double settle = cfg.settle_time();
  const double measure = cfg.t_predict - cfg.t_trans;

  for (std::size_t k = 0; k < spec.attractors.size(); ++k) {
    const auto& att = spec.attractors[k];
    Reconstruction rec;
    rec.attractor_id = static_cast<int>(k + 1);
    rec.source = att.system.name();
    rec.b = att.b;
    const Trajectory truth = pa.signals[k].trajectory.tail_from(pa.signals[k].trajectory.duration() - measure);
    const C1Result truth_c1 = detect_c1(truth, cp);
    const ExtremaSignature truth_sig = make_signature(truth, truth_c1, sp);
    if (truth_c1.cls == C1Class::limit_cycle) rec.expected_period = count_period(truth, sp.coord, sp.kind).period;

    const ReservoirFlow flow(ClosedLoop(m.net, m.readout, constant_bias(cfg.N, att.b), cfg.sigma, cfg.gamma));
    auto check = [&](const FlowRun& run, C1Result& c1, ExtremaSignature& sig) {
      c1 = detect_c1(run.window, cp);
      sig = make_signature(run.window, c1, sp);
      if (rec.expected_period == 0) return c1.cls == truth_c1.cls && signatures_match(sig, truth_sig);
      int got = 0;
      try {
        const PeriodCount pc = count_period(run.window, sp.coord, sp.kind);
        got = pc.periodic ? pc.period : 0;
      } catch (const InsufficientDataError&) {
      }
      sig.period = got;
      return c1.cls == C1Class::limit_cycle && got == rec.expected_period;
    };
    const FlowRun run = flow.run(pa.warm_starts[k], cfg.tau, settle, measure);
    rec.reconstructed = check(run, rec.c1, rec.signature);
    rec.final_state = run.final_state;
    if (rec.reconstructed && spec.confirm_time > 0.0) {
      C1Result c1;
      ExtremaSignature sig;
      if (!check(flow.run(run.final_state, cfg.tau, spec.confirm_time, measure), c1, sig)) {
        spdlog::info("seed {}: attractor {} passes the standard window but becomes {} (period {}) after {} more units",
                     network_seed, rec.attractor_id, to_string(c1.cls), sig.period, spec.confirm_time);
        rec.reconstructed = false;
        rec.c1 = c1;
        rec.signature = sig;
      }
    }
    m.all_reconstructed = m.all_reconstructed && rec.reconstructed;
    m.reconstructions.push_back(std::move(rec));
  }
  return m;
}

BiasTaskResult run_bias_task(const TaskSpec& spec) {
  spec.validate();
  BiasTaskResult res;
  RCConfig cfg = spec.config;

  // Network seeds base_seed, base_seed + 1, ... until every trained attractor is
  // reconstructed; without a success the first seed is kept.
  std::optional<TrainedModel> chosen;
  for (int a = 0; a < spec.seed_attempts; ++a) {
    const std::uint64_t seed = matrix_seed(spec.base_seed, a);
    TrainedModel m = train_and_check(spec, cfg, seed);
    res.seeds_tried = a + 1;
    for (const auto& rec : m.reconstructions)
      if (!rec.reconstructed)
        spdlog::log(spec.seed_attempts > 1 ? spdlog::level::debug : spdlog::level::warn,
                    "seed {}: attractor {} ({}) at b = {} is not reconstructed (c1 {}, period {})", seed,
                    rec.attractor_id, rec.source, rec.b, to_string(rec.c1.cls), rec.signature.period);
    const bool ok = m.all_reconstructed;
    if (ok || !chosen) {
      chosen = std::move(m);
      res.network_seed = seed;
    }
    if (ok) break;
  }
  if (!chosen->all_reconstructed)
    spdlog::warn("no network seed in [{}, {}] reconstructs every trained attractor; continuing with seed {}",
                 spec.base_seed, matrix_seed(spec.base_seed, spec.seed_attempts - 1), res.network_seed);
  else
    spdlog::info("network seed {} reconstructs every trained attractor ({} tried)", res.network_seed,
                 res.seeds_tried);
  cfg.seeds.network_seed = res.network_seed;
  res.net = std::move(chosen->net);
  res.readout = std::move(chosen->readout);
  res.residual_rms = chosen->residual_rms;
  res.reconstructions = std::move(chosen->reconstructions);
  res.all_reconstructed = chosen->all_reconstructed;

  const SignatureParams sp = bias_task_signature(spec.task);
  const ClassifierParams cp;

  SweepPlan plan;
  plan.step = spec.sweep_step;
  plan.t_settle = spec.t_settle;
  plan.t_measure = spec.t_measure;
  plan.tau = cfg.tau;
  plan.coord = sp.coord;
  plan.kind = sp.kind;
  SweepOptions opts;
  const FlowFamily family = bias_family(res.net, res.readout, cfg);

  auto track = [&](const Vec& seed, double b0, const std::string& fam) {
    auto branches = track_family(family, plan, seed, b0, spec.sweep_lo, spec.sweep_hi, opts,
                                 static_cast<int>(res.branches.size()));
    const int id = branches.front().id;
    branches.front().family = fam;
    for (auto& b : branches) res.branches.push_back(std::move(b));
    return id;
  };

  for (const auto& rec : res.reconstructions) {
    spdlog::info("tracking attractor {} from b = {}", rec.attractor_id, rec.b);
    res.family_branch.push_back(track(rec.final_state, rec.b, "GA"));
  }

  if (spec.track_uas) {
    int tracked = 0;
    for (std::size_t k = 0; k < spec.attractors.size() && tracked < spec.max_ua_tracks; ++k) {
      const double b0 = spec.attractors[k].b;
      const ReservoirFlow flow(ClosedLoop(res.net, res.readout, constant_bias(cfg.N, b0), cfg.sigma, cfg.gamma));
      const auto states = draw_initial_states(cfg.N, spec.n_ic_ua, ic_seed_base(spec.base_seed) + 1000 * k);
      const OutputClassifier classify = [&](Trajectory w) {
        ClassifiedOutput o;
        const C1Result c1 = detect_c1(w, cp);
        o.label.c1 = c1.cls;
        o.label.period = c1.period;
        o.label.value = Label::ua_preliminary;
        o.signature = make_signature(w, c1, sp);
        o.window = std::move(w);
        return o;
      };
      const auto records = dedup_attractors(
          basin_outputs_parallel(flow, states, {cfg.tau, spec.t_settle, spec.t_measure}, classify, spec.threads));
      for (const auto& r : records) {
        if (tracked >= spec.max_ua_tracks) break;
        bool known = false;
        for (const auto& br : res.branches)
          for (const auto& p : br.points)
            if (std::abs(p.param - b0) < 0.5 * spec.sweep_step && signatures_match(p.signature, r.signature))
              known = true;
        if (known) continue;
        spdlog::info("tracking untrained attractor ({}) found at b = {}", to_string(r.label.c1), b0);
        track(r.state, b0, "UA");
        ++tracked;
      }
    }
  }

  // Successors are untrained unless they land on a family grown from a trained attractor.
  for (auto& br : res.branches) {
    if (!br.family.empty() || br.points.empty()) continue;
    br.family = "UA";
    const BranchPoint& first = br.points.front();
    for (const auto& other : res.branches) {
      if (other.family != "GA" || other.parent >= 0) continue;
      for (const auto& p : other.points)
        if (std::abs(p.param - first.param) < 0.5 * spec.sweep_step &&
            continues(p.signature, first.signature, plan.jump_tol))
          br.family = "GA";
    }
  }
  for (auto& br : res.branches)
    for (auto& p : br.points) p.label = br.family;
  return res;
}

}  // namespace

BiasTaskResult run_task2(const TaskSpec& spec) {
  if (spec.task != TaskKind::task2 && spec.task != TaskKind::task2_multi)
    throw ConfigError("run_task2 needs a task2 or task2_multi spec");
  return run_bias_task(spec);
}

BiasTaskResult run_task3(const TaskSpec& spec) {
  if (spec.task != TaskKind::task3) throw ConfigError("run_task3 needs a task3 spec");
  BiasTaskResult res = run_bias_task(spec);
  std::size_t lo = 0, hi = 0;
  for (std::size_t k = 0; k < spec.attractors.size(); ++k) {
    if (spec.attractors[k].b < spec.attractors[lo].b) lo = k;
    if (spec.attractors[k].b > spec.attractors[hi].b) hi = k;
  }
  const auto branch = [&](std::size_t k) -> const Branch& {
    return res.branches.at(static_cast<std::size_t>(res.family_branch.at(k)));
  };
  res.gap = classify_gap_filling(branch(lo), branch(hi), spec.attractors[lo].b, spec.attractors[hi].b,
                                 spec.sweep_step);
  spdlog::info("task3 outcome: {}", to_string(res.gap->outcome));
  return res;
}

namespace {

void write_common(const TaskSpec& spec) {
  fs::create_directories(spec.out_dir);
  write_json_file((fs::path(spec.out_dir) / "config.json").string(), to_json(spec));
  write_json_file((fs::path(spec.out_dir) / "manifest.json").string(), run_manifest(spec));
}

std::string out_path(const TaskSpec& spec, const char* name) { return (fs::path(spec.out_dir) / name).string(); }

}  // namespace

void write_task1_outputs(const TaskSpec& spec, const Task1Result& result) {
  if (spec.out_dir.empty()) return;
  write_common(spec);
  {
    auto os = open_output(out_path(spec, "ensemble.csv"));
    write_ensemble_csv(os, result.ensemble);
  }
  {
    auto os = open_output(out_path(spec, "scenario_map.csv"));
    write_scenario_map_csv(os, result.ensemble);
  }
  {
    auto os = open_output(out_path(spec, "classification_report.csv"));
    write_classification_report(os, ensemble_report_rows(result.ensemble));
  }
  if (spec.plots) {
    auto os = open_output(out_path(spec, "ensemble.svg"));
    write_ensemble_svg(os, result.ensemble, {"Scenario frequency", "rho", "matrices"});
  }
  if (spec.fine_sweep) {
    const auto rows = emit_bifurcation_data(result.fine_branches, 2, ExtremumKind::maxima);
    {
      auto os = open_output(out_path(spec, "fine_branches.csv"));
      write_branches_csv(os, rows);
    }
    if (spec.plots) {
      auto os = open_output(out_path(spec, "fine_branches.svg"));
      write_branches_svg(os, rows, {"x3 maxima", "rho", "x3"});
    }
  }
}

void write_bias_task_outputs(const TaskSpec& spec, const BiasTaskResult& result) {
  if (spec.out_dir.empty()) return;
  write_common(spec);
  RCConfig cfg = spec.config;
  cfg.seeds.network_seed = result.network_seed;
  save_model(out_path(spec, "model.json"), cfg, result.net, &result.readout);
  {
    auto os = open_output(out_path(spec, "reconstruction.csv"));
    os << "network_seed,attractor_id,source,b,expected_period,period,c1,reconstructed\n";
    for (const auto& r : result.reconstructions)
      os << result.network_seed << ',' << r.attractor_id << ',' << r.source << ',' << format_double(r.b) << ','
         << r.expected_period << ',' << r.signature.period << ',' << to_string(r.c1.cls) << ','
         << (r.reconstructed ? 1 : 0) << '\n';
  }
  {
    auto os = open_output(out_path(spec, "branch_summary.csv"));
    os << "branch_id,parent,family,lo,hi,lost,lost_at,periods\n";
    for (const auto& b : result.branches) {
      os << b.id << ',' << b.parent << ',' << b.family << ',' << format_double(b.lo()) << ','
         << format_double(b.hi()) << ',' << (b.lost ? 1 : 0) << ',' << format_double(b.lost ? b.lost_at : 0.0)
         << ',';
      const auto seq = period_sequence(b);
      for (std::size_t i = 0; i < seq.size(); ++i) os << (i ? "-" : "") << seq[i];
      os << '\n';
    }
  }
  const SignatureParams sp = bias_task_signature(spec.task);
  const auto rows = emit_bifurcation_data(result.branches, sp.coord, sp.kind);
  {
    auto os = open_output(out_path(spec, "branches.csv"));
    write_branches_csv(os, rows);
  }
  if (result.gap) {
    write_json_file(out_path(spec, "outcome.json"), {{"outcome", to_string(result.gap->outcome)},
                                                     {"window_lo", result.gap->window_lo},
                                                     {"window_hi", result.gap->window_hi},
                                                     {"spanning_branch", result.gap->spanning_branch}});
  }
  if (spec.plots) {
    auto os = open_output(out_path(spec, "branches.svg"));
    const std::string y = sp.coord == 0 ? "x1 minima" : "x2 minima";
    write_branches_svg(os, rows, {y, "b", y});
  }
}

}  // namespace confab
