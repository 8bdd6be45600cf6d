#include "confab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <spdlog/spdlog.h>

#include "confab/rng.hpp"
#include "confab/training.hpp"

namespace confab {

FlowRun ReservoirFlow::run(const Vec& x0, double tau, double discard, double measure) const {
  ClosedLoopOptions opts;
  opts.keep_states = false;
  opts.record_from = discard;
  ClosedLoopResult res = closed_loop_run(loop_, x0, tau, discard + measure, opts);
  return {std::move(res.projected), std::move(res.final_state)};
}

FlowRun FieldFlow::run(const Vec& x0, double tau, double discard, double measure) const {
  const Index n_steps = steps_for(discard + measure, tau);
  const Index first = std::min(steps_for(discard, tau), n_steps);
  Vec x = x0;
  Rk4Scratch scratch(x.size());
  FlowRun out;
  out.window.tau = tau;
  out.window.t0 = static_cast<double>(first) * tau;
  auto project = [&](const Vec& s) { return projection_ ? projection_(s) : s; };
  const Index out_dim = project(x).size();
  out.window.samples.resize(out_dim, n_steps - first + 1);
  if (first == 0) out.window.samples.col(0) = project(x);
  for (Index i = 1; i <= n_steps; ++i) {
    if (!rk4_advance(f_.rhs, x, tau, scratch))
      throw DivergenceError("FieldFlow::run: non-finite state", static_cast<std::size_t>(i));
    if (i >= first) out.window.samples.col(i - first) = project(x);
  }
  out.final_state = x;
  return out;
}

FlowFamily bias_family(const Network& net, const Readout& readout, const RCConfig& config) {
  return [&net, &readout, config](double b) -> std::unique_ptr<Flow> {
    return std::make_unique<ReservoirFlow>(
        ClosedLoop(net, readout, constant_bias(net.M.rows(), b), config.sigma, config.gamma));
  };
}

void SweepPlan::validate() const {
  if (step == 0.0 || !std::isfinite(step)) throw ConfigError("sweep step must be nonzero");
  if ((stop - start) * step < 0.0) throw ConfigError("sweep step points away from the stop value");
  if (!(t_settle >= 0.0) || !(t_measure > 0.0) || !(tau > 0.0))
    throw ConfigError("sweep budgets and timestep must be positive");
}

std::vector<double> SweepPlan::values() const {
  validate();
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  // Multiplying instead of accumulating keeps grid values identical across sweeps.
  for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

double Branch::lo() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : points) v = std::min(v, p.param);
  return v;
}

double Branch::hi() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) v = std::max(v, p.param);
  return v;
}

bool Branch::alive_at(double p, double tol) const { return !points.empty() && p >= lo() - tol && p <= hi() + tol; }

namespace {

BranchPoint measure_point(const FlowRun& run, double param, const SweepPlan& plan, const SweepOptions& options) {
  BranchPoint pt;
  pt.param = param;
  pt.c1 = detect_c1(run.window, options.classifier);
  SignatureParams sp;
  sp.coord = plan.coord;
  sp.kind = plan.kind;
  sp.cluster_tol = options.cluster_tol;
  sp.period_tol = options.period_tol;
  sp.max_period = options.classifier.max_period;
  pt.signature = make_signature(run.window, pt.c1, sp);
  pt.label = options.labeler ? options.labeler(run.window, pt.c1) : to_string(pt.c1.cls);
  pt.state = run.final_state;
  return pt;
}

}  // namespace

bool continues(const ExtremaSignature& a, const ExtremaSignature& b, double jump_tol, const MatchParams& match) {
  if (a.c1 == C1Class::aperiodic && b.c1 == C1Class::aperiodic) return signatures_match(a, b, match);
  return signature_distance(a, b) <= jump_tol;
}

std::vector<Branch> sweep_branch(const FlowFamily& family, const SweepPlan& plan, const Vec& seed_state,
                                 const SweepOptions& options, int first_id) {
  const std::vector<double> params = plan.values();
  std::vector<Branch> out(1);
  out.front().id = first_id;
  Vec state = seed_state;
  int successors = 0;

  for (double p : params) {
    const auto flow = family(p);
    const Vec& x0 = plan.warm_start == WarmStart::previous_attractor_point ? state : seed_state;
    FlowRun run;
    try {
      run = flow->run(x0, plan.tau, plan.t_settle, plan.t_measure);
      BranchPoint pt = measure_point(run, p, plan, options);
      Branch& cur = out.back();
      if (!cur.points.empty() && !continues(cur.points.back().signature, pt.signature, plan.jump_tol)) {
        FlowRun retry = flow->run(x0, plan.tau, 2.0 * plan.t_settle, plan.t_measure);
        BranchPoint pt2 = measure_point(retry, p, plan, options);
        const bool recovered = continues(cur.points.back().signature, pt2.signature, plan.jump_tol);
        run = std::move(retry);
        pt = std::move(pt2);
        if (!recovered) {
          cur.lost = true;
          cur.lost_at = p;
          spdlog::debug("branch {} lost at {} = {}", cur.id, plan.parameter, p);
          if (options.max_successors > 0 && successors == options.max_successors) return out;
          ++successors;
          Branch next;
          next.id = first_id + static_cast<int>(out.size());
          next.parent = cur.id;
          out.push_back(std::move(next));
        }
      }
      out.back().points.push_back(std::move(pt));
    } catch (const DivergenceError& e) {
      // Only possible for unbounded test fields; the reservoir cannot diverge.
      spdlog::warn("sweep diverged at {} = {}: {}", plan.parameter, p, e.what());
      out.back().lost = true;
      out.back().lost_at = p;
      return out;
    }
    state = run.final_state;
  }
  return out;
}

std::vector<Branch> track_family(const FlowFamily& family, const SweepPlan& base, const Vec& seed_state, double p0,
                                 double lo, double hi, const SweepOptions& options, int first_id) {
  const double step = std::abs(base.step);
  SweepPlan down = base;
  down.start = p0;
  down.stop = std::min(lo, p0);
  down.step = -step;
  SweepPlan up = base;
  up.start = p0;
  up.stop = std::max(hi, p0);
  up.step = step;

  std::vector<Branch> dn = sweep_branch(family, down, seed_state, options, 0);
  std::vector<Branch> upb = sweep_branch(family, up, seed_state, options, static_cast<int>(dn.size()));

  Branch joined;
  joined.points.assign(dn.front().points.rbegin(), dn.front().points.rend());
  if (!upb.front().points.empty())
    joined.points.insert(joined.points.end(), upb.front().points.begin() + 1, upb.front().points.end());
  joined.lost = dn.front().lost || upb.front().lost;
  joined.lost_at = dn.front().lost ? dn.front().lost_at : upb.front().lost_at;

  // Renumber: joined branch first, then successors of the downward and upward sweeps.
  std::map<int, int> remap{{dn.front().id, first_id}, {upb.front().id, first_id}};
  std::vector<Branch> out;
  joined.id = first_id;
  out.push_back(std::move(joined));
  auto append = [&](std::vector<Branch>& src) {
    for (std::size_t k = 1; k < src.size(); ++k) {
      const int id = first_id + static_cast<int>(out.size());
      remap[src[k].id] = id;
      src[k].id = id;
      out.push_back(std::move(src[k]));
    }
  };
  append(dn);
  append(upb);
  for (auto& b : out)
    if (b.parent >= 0) b.parent = remap.at(b.parent);
  return out;
}

std::vector<BifurcationRow> emit_bifurcation_data(const std::vector<Branch>& branches, Index coord, ExtremumKind kind) {
  std::vector<BifurcationRow> rows;
  for (const auto& b : branches) {
    for (const auto& p : b.points) {
      if (p.signature.coordinate_index != coord || p.signature.kind != kind)
        throw Error("emit_bifurcation_data: branch " + std::to_string(b.id) + " was measured on another extremum series");
      for (double v : p.signature.values) rows.push_back({p.param, v, b.id, p.label, kind, coord});
    }
  }
  return rows;
}

std::vector<Vec> draw_initial_states(Index N, std::size_t n_ic, std::uint64_t ic_seed) {
  std::vector<Vec> out;
  out.reserve(n_ic);
  for (std::size_t j = 0; j < n_ic; ++j) {
    std::mt19937_64 gen(ic_seed + j);
    Vec r(N);
    for (Index i = 0; i < N; ++i) r(i) = uniform_pm1(gen);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ClassifiedOutput> basin_outputs_serial(const Flow& flow, const std::vector<Vec>& states,
                                                   const BasinRun& run, const OutputClassifier& classify) {
  std::vector<ClassifiedOutput> out;
  out.reserve(states.size());
  for (const auto& x0 : states) {
    FlowRun r = flow.run(x0, run.tau, run.settle, run.measure);
    out.push_back(classify(std::move(r.window)));
    out.back().final_state = std::move(r.final_state);
  }
  return out;
}

OutputClassifier reference_classifier(const ReferenceFit& ref, const ClassifierParams& params) {
  return [ref, params](Trajectory window) {
    ClassifiedOutput o;
    o.label = classify_output(window, ref, params);
    SignatureParams sp;
    sp.coord = 2;
    sp.kind = ExtremumKind::maxima;
    sp.period_tol = params.eps_per;
    sp.max_period = params.max_period;
    o.signature = make_signature(window, {o.label.c1, o.label.period}, sp);
    o.window = std::move(window);
    return o;
  };
}

std::vector<AttractorRecord> basin_sample(const Network& net, const Readout& readout, const Vec& bias,
                                          const RCConfig& config, std::size_t n_ic, std::uint64_t ic_seed,
                                          const ReferenceFit& ref, int threads) {
  if (n_ic < 1) throw ConfigError("basin_sample: n_ic must be at least 1");
  const ReservoirFlow flow(ClosedLoop(net, readout, bias, config.sigma, config.gamma));
  const auto states = draw_initial_states(net.M.rows(), n_ic, ic_seed);
  const BasinRun run{config.tau, config.settle_time(), config.t_predict - config.t_trans};
  const auto classify = reference_classifier(ref);
  const auto outputs = threads > 1 ? basin_outputs_parallel(flow, states, run, classify, threads)
                                   : basin_outputs_serial(flow, states, run, classify);
  return dedup_attractors(outputs);
}

std::vector<std::array<int, 5>> EnsembleResult::table() const {
  std::vector<std::array<int, 5>> t(rho_grid.size(), std::array<int, 5>{});
  for (const auto& c : cells)
    if (c.scenario >= 1 && c.scenario <= 5) ++t[c.rho_index][static_cast<std::size_t>(c.scenario - 1)];
  return t;
}

std::uint64_t matrix_seed(std::uint64_t base_seed, int matrix_id) {
  return base_seed + static_cast<std::uint64_t>(matrix_id);
}

std::uint64_t ic_seed_base(std::uint64_t base_seed) { return base_seed * 1000000ULL; }

GroundTruth lorenz_ground_truth(const RCConfig& config) {
  GroundTruth gt;
  gt.signal = generate_training_signal(SourceSystem::lorenz(), config);
  gt.ref = fit_reference(gt.signal.trajectory);
  return gt;
}

EnsembleCell ensemble_cell(const EnsembleSpec& spec, const EnsembleInputs& in, int matrix_id, std::size_t rho_index) {
  EnsembleCell cell;
  cell.matrix_id = matrix_id;
  cell.rho_index = rho_index;
  cell.rho = spec.rho_grid.at(rho_index);
  try {
    RCConfig cfg = spec.base;
    cfg.rho = cell.rho;
    const auto m = static_cast<std::size_t>(matrix_id);
    const Network net = network_from_raw(in.raw_M.at(m), in.W_in, cfg.rho, in.m_seeds.at(m));
    const SingleTraining tr = train_single(in.truth.signal, cfg, net);
    const ReservoirFlow flow(ClosedLoop(net, tr.readout, Vec::Zero(cfg.N), cfg.sigma, cfg.gamma));
    auto states = draw_initial_states(cfg.N, spec.n_ic, ic_seed_base(spec.base_seed));
    if (spec.include_warm_start) states.insert(states.begin(), tr.warm_start);
    const BasinRun run{cfg.tau, cfg.settle_time(), cfg.t_predict - cfg.t_trans};
    const auto outputs = basin_outputs_serial(flow, states, run, reference_classifier(in.truth.ref, spec.classifier));
    for (const auto& o : outputs) {
      cell.ic_labels.push_back(o.label);
      cell.ic_hashes.push_back(signature_hash(o.signature));
    }
    cell.records = dedup_attractors(outputs);
    cell.scenario = assign_scenario(cell.records);
  } catch (const std::exception& e) {
    cell.error = e.what();
    spdlog::error("ensemble cell matrix {} (seed {}) rho {} failed: {}", matrix_id,
                  matrix_seed(spec.base_seed, matrix_id), cell.rho, e.what());
  }
  return cell;
}

EnsembleInputs prepare_ensemble(const EnsembleSpec& spec) {
  spec.base.validate();
  if (spec.n_matrices < 1) throw ConfigError("ensemble needs at least one matrix");
  if (spec.rho_grid.empty()) throw ConfigError("ensemble needs a non-empty rho grid");
  if (spec.n_ic < 1) throw ConfigError("ensemble needs n_ic >= 1");
  EnsembleInputs in;
  in.truth = lorenz_ground_truth(spec.base);
  in.W_in = sample_input_matrix(spec.base.N, spec.base.D, spec.base.seeds.input_seed);
  for (int i = 0; i < spec.n_matrices; ++i) {
    std::uint64_t used = 0;
    in.raw_M.push_back(sample_internal_matrix(spec.base.N, spec.base.P, matrix_seed(spec.base_seed, i), &used));
    in.m_seeds.push_back(used);
  }
  return in;
}

EnsembleResult scenario_ensemble_serial(const EnsembleSpec& spec) {
  const EnsembleInputs in = prepare_ensemble(spec);
  EnsembleResult res;
  res.rho_grid = spec.rho_grid;
  for (int i = 0; i < spec.n_matrices; ++i)
    for (std::size_t k = 0; k < spec.rho_grid.size(); ++k)
      res.cells.push_back(ensemble_cell(spec, in, i, k));
  return res;
}

}  // namespace confab
