// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Oracles here are independent of the library code they check (exact solutions,
// a complex eigensolver, an augmented least-squares solve, ground-truth flows).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "confab/harness.hpp"
#include "confab/rng.hpp"

namespace fs = std::filesystem;
using namespace confab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Mat random_matrix(Index r, Index c, std::mt19937_64& g) {
  Mat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = uniform_pm1(g);
  return m;
}

// 1 ---------------------------------------------------------------------------

Outcome integrator_order() {
  struct Case {
    const char* name;
    VectorField f;
    Vec x0;
    double T;
    std::function<Vec(double)> exact;
  };
  Vec a0(2);
  a0 << 1.0, 0.0;
  Vec b0(1);
  b0 << 1.0;
  const std::vector<Case> cases{
      {"harmonic",
       {2, [](const Vec& x, Vec& dx) {
          dx(0) = x(1);
          dx(1) = -x(0);
        }},
       a0, 5.0,
       [](double t) {
         Vec x(2);
         x << std::cos(t), -std::sin(t);
         return x;
       }},
      // x' = -x^3 -> x = 1 / sqrt(1 + 2 t)
      {"cubic decay", {1, [](const Vec& x, Vec& dx) { dx(0) = -x(0) * x(0) * x(0); }}, b0, 2.0,
       [](double t) { return Vec::Constant(1, 1.0 / std::sqrt(1.0 + 2.0 * t)); }},
  };
  Outcome o{true, ""};
  for (const auto& c : cases) {
    auto err = [&](double tau) {
      const Trajectory tr = integrate(c.f, c.x0, tau, static_cast<std::size_t>(std::llround(c.T / tau)));
      return (tr.sample(tr.size() - 1) - c.exact(c.T)).norm();
    };
    const double ratio = err(0.02) / err(0.01);
    o.pass = o.pass && std::abs(ratio - 16.0) <= 1.6;
    o.detail += std::string(c.name) + " ratio " + fmt("%.3f", ratio) + "; ";
  }
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome ridge_oracle() {
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    std::mt19937_64 g(1000 + static_cast<std::uint64_t>(s));
    const Index N = 3 + s % 4, D = 1 + s % 3, T = 25 + s;
    const Trajectory r = [&] {
      Trajectory t;
      t.tau = 1.0;
      t.samples = random_matrix(N, T, g);
      return t;
    }();
    const Trajectory u = [&] {
      Trajectory t;
      t.tau = 1.0;
      t.samples = random_matrix(D, T, g);
      return t;
    }();
    RCConfig c;
    c.tau = 1.0;
    c.t_listen = 1.0;
    c.t_train = static_cast<double>(T - 1);
    const Drive d{&r, &u, 0.0, 1};
    const RegressionData data = assemble_regression_data(std::span<const Drive>(&d, 1), c);
    const double beta = std::pow(10.0, -1 - s % 4);
    const Readout ro = train_readout(data, beta);

    // min |A w - y|^2 with A = [X^T; sqrt(beta) I]
    const Index K = data.X.rows(), n = data.X.cols();
    Mat A(n + K, K);
    A << data.X.transpose(), std::sqrt(beta) * Mat::Identity(K, K);
    Mat y = Mat::Zero(n + K, D);
    y.topRows(n) = data.Y.transpose();
    const Mat oracle = A.colPivHouseholderQr().solve(y).transpose();
    worst = std::max(worst, (ro.W_out - oracle).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-8, "max deviation " + fmt("%.3g", worst) + " over 20 instances"};
}

// 3 ---------------------------------------------------------------------------

Outcome spectral_contract() {
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double target = 0.05 + 1.95 * s / 99.0;
    const Mat raw = sample_internal_matrix(100, 0.05, 5000 + static_cast<std::uint64_t>(s));
    const Mat M = rescale_to_radius(raw, target);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(M.cast<std::complex<double>>());
    worst = std::max(worst, std::abs(ces.eigenvalues().cwiseAbs().maxCoeff() - target));
  }
  const double id = spectral_radius(Mat::Identity(50, 50));
  return {worst < 1e-6 && id == 1.0, "max |rho - target| " + fmt("%.3g", worst) + ", identity " + fmt("%.17g", id)};
}

// 4 ---------------------------------------------------------------------------

Outcome sprott_cascade() {
  const double tau = 0.01;
  Vec3 x = SourceSystem::sprott(27.0).default_initial_state();
  std::vector<int> seq;
  for (int k = 0; k <= 100; ++k) {
    const double a = 27.0 - 0.1 * k;
    const SourceSystem s = SourceSystem::sprott(a);
    const Trajectory tr = settle_and_record(s, x, tau, k == 0 ? 300.0 : 150.0, 150.0);
    x = tr.sample(tr.size() - 1);
    const PeriodCount pc = count_period(tr, 1, ExtremumKind::minima);
    const int p = pc.periodic ? pc.period : 0;
    if (p > 0 && (seq.empty() || seq.back() != p)) seq.push_back(p);
  }
  // 1, 2, 4 in order with nothing else in between
  bool ok = false;
  for (std::size_t i = 0; i + 2 < seq.size(); ++i)
    if (seq[i] == 1 && seq[i + 1] == 2 && seq[i + 2] == 4) ok = true;
  return {ok, "period counts along a = 27 -> 17: " + join(seq)};
}

// 5 ---------------------------------------------------------------------------

Outcome classifier_fixtures() {
  const RCConfig c = RCConfig::task1();
  const GroundTruth gt = lorenz_ground_truth(c);
  const Trajectory w = gt.signal.trajectory.tail_from(c.t_trans);
  const Label self = classify_output(w, gt.ref).value;
  Trajectory up = w;
  up.samples.row(2).array() += 5.0;
  const ClassLabel shifted = classify_output(up, gt.ref);
  Trajectory constant = w;
  constant.samples.colwise() = Eigen::Vector3d(1.0, 2.0, 20.0);
  Trajectory circle = w;
  for (Index i = 0; i < circle.size(); ++i) circle.samples.col(i) << 10 * std::cos(circle.time(i)), 10 * std::sin(circle.time(i)), 25.0;
  const Label lc = classify_output(constant, gt.ref).value;
  const Label lr = classify_output(circle, gt.ref).value;
  const bool ok = self == Label::good_recon && shifted.value == Label::poor_recon && shifted.c2 && !shifted.c3 &&
                  lc == Label::ua_preliminary && lr == Label::ua_preliminary;
  return {ok, std::string("lorenz ") + to_string(self) + ", +5 x3 " + to_string(shifted.value) + ", constant " +
                  to_string(lc) + ", circle " + to_string(lr)};
}

// 6 ---------------------------------------------------------------------------

Outcome boundedness() {
  int ok_runs = 0;
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    std::mt19937_64 g(7000 + static_cast<std::uint64_t>(s));
    RCConfig c = RCConfig::task1();
    c.N = (s % 3 == 0) ? 50 : 100;
    c.rho = 2.0 * uniform01(g);
    c.sigma = 2.0 * uniform01(g);
    c.seeds.network_seed = 100 + static_cast<std::uint64_t>(s);
    const Network net = build_network(c);
    Readout ro;
    ro.W_out = random_matrix(3, 2 * c.N, g);
    switch (s % 4) {
      case 0: ro.W_out *= 1e3; break;                          // blown-up weights
      case 1: ro.W_out.rightCols(c.N) *= -1e4; break;          // sign-flipped square block
      case 2: ro.W_out(0, 0) = 1e12; break;                    // one corrupted entry
      default: break;
    }
    Vec r0(c.N);
    for (Index i = 0; i < c.N; ++i) r0(i) = uniform_pm1(g);
    try {
      const auto res = closed_loop_run(net, ro, r0, constant_bias(c.N, uniform_pm1(g)), c, 20.0);
      const double m = res.states.samples.cwiseAbs().maxCoeff();
      worst = std::max(worst, m);
      if (m <= 1.0 + 1e-9 && res.projected.samples.allFinite()) ++ok_runs;
    } catch (const DivergenceError&) {
    }
  }
  return {ok_runs == 200, std::to_string(ok_runs) + "/200 runs bounded, max |r| " + fmt("%.12f", worst)};
}

// 7 ---------------------------------------------------------------------------

struct Dirs {
  fs::path root;
  fs::path run(const std::string& name, int pass) const { return root / ("pass" + std::to_string(pass)) / name; }
};

Outcome task1_ensemble(const Dirs& dirs, int pass, int threads) {
  TaskSpec s = TaskSpec::defaults(TaskKind::task1);
  s.rho_grid = {0.0, 0.15, 0.5, 1.0};
  s.n_matrices = 10;
  s.n_ic = 30;
  s.base_seed = 1;
  s.threads = threads;
  s.plots = false;
  s.out_dir = dirs.run("task1", pass).string();
  const Task1Result r = run_task1(s);
  write_task1_outputs(s, r);
  const auto t = r.ensemble.table();
  const int at0 = t[0][2];
  const int at05 = t[2][0] + t[2][1];
  const int at015 = t[1][3] + t[1][4];
  std::string detail;
  for (std::size_t k = 0; k < t.size(); ++k) {
    detail += "rho " + fmt("%g", r.ensemble.rho_grid[k]) + " [";
    for (int i = 0; i < 5; ++i) detail += (i ? " " : "") + std::to_string(t[k][static_cast<std::size_t>(i)]);
    detail += "] ";
  }
  return {at0 == 10 && at05 >= 6 && at015 >= 1, detail};
}

// 8 ---------------------------------------------------------------------------

const std::vector<std::uint64_t> kDocumentedSeeds{1, 101, 201, 301, 401};

Outcome task2_reference(const Dirs& dirs, int pass, int threads, std::vector<std::uint64_t>& used) {
  Outcome o{false, ""};
  const auto seeds = used.empty() ? kDocumentedSeeds : used;
  std::vector<std::uint64_t> ran;
  for (std::uint64_t seed : seeds) {
    ran.push_back(seed);
    TaskSpec s = TaskSpec::defaults(TaskKind::task2, 0.4);
    s.base_seed = seed;
    s.threads = threads;
    s.track_uas = false;
    s.plots = false;
    s.out_dir = dirs.run("task2_seed" + std::to_string(seed), pass).string();
    const BiasTaskResult r = run_task2(s);
    write_bias_task_outputs(s, r);
    const bool periods = r.reconstructions.size() == 2 && r.reconstructions[0].reconstructed &&
                         r.reconstructions[0].expected_period == 4 && r.reconstructions[1].reconstructed &&
                         r.reconstructions[1].expected_period == 1;
    int path_branch = -1;
    for (const auto& b : r.branches)
      if (path_branch < 0 && has_period_path(b, {4, 2, 1})) path_branch = b.id;
    o.detail += "base seed " + std::to_string(seed) + " (network seed " + std::to_string(r.network_seed) +
                "): trained periods " + (periods ? "4/1" : "not reconstructed") + ", ";
    for (const auto& b : r.branches)
      if (b.parent < 0) o.detail += "branch " + std::to_string(b.id) + " periods [" + join(period_sequence(b)) + "] ";
    o.detail += "; ";
    if (periods && path_branch >= 0) {
      o.pass = true;
      break;
    }
  }
  used = ran;  // the rerun covers every seed this pass wrote
  return o;
}

// 9 ---------------------------------------------------------------------------

Branch fixture(int id, double lo, double hi) {
  Branch b;
  b.id = id;
  for (int k = 0; lo + 0.01 * k <= hi + 1e-12; ++k) {
    BranchPoint p;
    p.param = lo + 0.01 * k;
    b.points.push_back(p);
  }
  return b;
}

Outcome task3_outcomes(const Dirs& dirs, int pass, int threads, std::vector<std::uint64_t>& used) {
  const bool fixtures =
      classify_gap_filling(fixture(0, -0.42, 0.42), fixture(1, 0.0, 0.42), -0.3, 0.3, 0.01).outcome ==
          GapOutcome::continuous_transition &&
      classify_gap_filling(fixture(0, -0.42, 0.05), fixture(1, -0.1, 0.42), -0.3, 0.3, 0.01).outcome ==
          GapOutcome::bistability &&
      classify_gap_filling(fixture(0, -0.42, -0.2), fixture(1, 0.1, 0.42), -0.3, 0.3, 0.01).outcome ==
          GapOutcome::ua_coexistence;
  Outcome o{false, std::string("fixtures ") + (fixtures ? "ok" : "WRONG") + "; "};
  bool window = false;
  const auto seeds = used.empty() ? kDocumentedSeeds : used;
  for (std::uint64_t seed : seeds) {
    TaskSpec s = TaskSpec::defaults(TaskKind::task3, 0.3);
    s.base_seed = seed;
    s.threads = threads;
    s.track_uas = false;
    s.plots = false;
    s.out_dir = dirs.run("task3_seed" + std::to_string(seed), pass).string();
    const BiasTaskResult r = run_task3(s);
    write_bias_task_outputs(s, r);
    o.detail += "base seed " + std::to_string(seed) + " (network seed " + std::to_string(r.network_seed) + "): " +
                to_string(r.gap->outcome);
    if (r.gap->outcome == GapOutcome::bistability) {
      o.detail += " [" + fmt("%g", r.gap->window_lo) + ", " + fmt("%g", r.gap->window_hi) + "]";
      if (r.gap->window_hi > r.gap->window_lo) window = true;
    }
    o.detail += "; ";
  }
  used = seeds;
  o.pass = fixtures && window;
  return o;
}

// 10 --------------------------------------------------------------------------

Outcome determinism(const Dirs& dirs) {
  int compared = 0, differing = 0;
  std::string first_diff;
  const fs::path a = dirs.root / "pass1";
  if (!fs::exists(a)) return {false, "criteria 7-9 did not run"};
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(e.path(), a);
    const fs::path b = dirs.root / "pass2" / rel;
    ++compared;
    if (!fs::exists(b) || slurp(e.path()) != slurp(b)) {
      ++differing;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  return {compared > 0 && differing == 0, std::to_string(compared) + " CSV files compared, " +
                                              std::to_string(differing) + " differ" +
                                              (first_diff.empty() ? "" : " (first: " + first_diff + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confab acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_out";
  int threads = 1;
  std::string log_level = "warn";
  app.add_option("--only", only, "Criteria to run (default: all)");
  app.add_option("--out", out, "Scratch directory for run outputs")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}
                                              : std::set<int>(only.begin(), only.end());
  const Dirs dirs{out};
  if (selected.count(10)) fs::remove_all(dirs.root);

  std::vector<std::uint64_t> seeds8, seeds9;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, integrator_order},
      {2, ridge_oracle},
      {3, spectral_contract},
      {4, sprott_cascade},
      {5, classifier_fixtures},
      {6, boundedness},
      {7, [&] { return task1_ensemble(dirs, 1, threads); }},
      {8, [&] { return task2_reference(dirs, 1, threads, seeds8); }},
      {9, [&] { return task3_outcomes(dirs, 1, threads, seeds9); }},
      {10,
       [&] {
         // Same base seeds as the first pass; only the runs that pass 1 made.
         if (selected.count(7)) task1_ensemble(dirs, 2, threads);
         if (selected.count(8)) task2_reference(dirs, 2, threads, seeds8);
         if (selected.count(9)) task3_outcomes(dirs, 2, threads, seeds9);
         return determinism(dirs);
       }},
  };

  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  (%.1f s)  %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
