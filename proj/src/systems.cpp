#include "confab/systems.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "confab/rng.hpp"

namespace confab {

Vec3 lorenz_rhs(const Vec3& x) {
  return {10.0 * (x[1] - x[0]), x[0] * (28.0 - x[2]) - x[1], x[0] * x[1] - (8.0 / 3.0) * x[2]};
}

Vec3 sprott_rhs(const Vec3& x, double a) {
  return {x[1] * (1.0 + x[2]), x[2] * (x[1] - a * x[0]), 0.55 * x[2] * x[2] - x[1] * x[1]};
}

Vec3 halvorsen_rhs(const Vec3& x) {
  constexpr double c = 1.3;
  return {-c * x[0] - 4.0 * (x[1] + x[2]) - x[1] * x[1], -c * x[1] - 4.0 * (x[2] + x[0]) - x[2] * x[2],
          -c * x[2] - 4.0 * (x[0] + x[1]) - x[0] * x[0]};
}

const char* to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::lorenz: return "lorenz";
    case SystemKind::sprott: return "sprott";
    case SystemKind::halvorsen: return "halvorsen";
  }
  return "?";
}

SystemKind system_kind_from_string(const std::string& s) {
  if (s == "lorenz") return SystemKind::lorenz;
  if (s == "sprott") return SystemKind::sprott;
  if (s == "halvorsen") return SystemKind::halvorsen;
  throw ConfigError("unknown source system '" + s + "'");
}

std::string SourceSystem::name() const {
  if (kind == SystemKind::sprott) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "sprott(a=%g)", a);
    return buf;
  }
  return to_string(kind);
}

VectorField SourceSystem::field() const {
  VectorField f;
  f.dimension = 3;
  switch (kind) {
    case SystemKind::lorenz:
      f.rhs = [](const Vec& x, Vec& dx) { dx = lorenz_rhs(Vec3(x)); };
      break;
    case SystemKind::sprott:
      f.rhs = [a = a](const Vec& x, Vec& dx) { dx = sprott_rhs(Vec3(x), a); };
      break;
    case SystemKind::halvorsen:
      f.rhs = [](const Vec& x, Vec& dx) { dx = halvorsen_rhs(Vec3(x)); };
      break;
  }
  return f;
}

Vec3 SourceSystem::default_initial_state() const {
  switch (kind) {
    case SystemKind::lorenz: return {1.0, 1.0, 1.0};
    // On the period-doubling branch for every a in [17, 27]; (0.1, 0.5, -0.2)
    // lands on a coexisting cycle at a = 17.
    case SystemKind::sprott: return {0.05, -0.5, -1.2};
    case SystemKind::halvorsen: return {-5.0, 0.0, 0.0};
  }
  return Vec3::Zero();
}

Trajectory settle_and_record(const SourceSystem& sys, const Vec3& x0, double tau, double transient, double duration) {
  const VectorField f = sys.field();
  Vec x = x0;
  Rk4Scratch s(3);
  const Index n_transient = steps_for(transient, tau);
  for (Index i = 0; i < n_transient; ++i) {
    if (!rk4_advance(f.rhs, x, tau, s))
      throw DivergenceError("transient of " + sys.name() + " diverged", static_cast<std::size_t>(i + 1));
  }
  return integrate(f, x, tau, static_cast<std::size_t>(steps_for(duration, tau)));
}

TrainingSignal generate_training_signal(const SourceSystem& sys, const RCConfig& config, std::uint64_t seed) {
  if (!(config.t_listen > 0.0 && config.t_listen < config.t_train && config.t_train < config.t_predict))
    throw ConfigError("generate_training_signal: times must satisfy 0 < t_listen < t_train < t_predict");
  Vec3 x0 = sys.default_initial_state();
  if (seed != 0) {
    std::mt19937_64 gen(seed);
    for (int k = 0; k < 3; ++k) x0[k] += 0.1 * uniform_pm1(gen);
  }
  TrainingSignal sig;
  try {
    sig.trajectory = settle_and_record(sys, x0, config.tau, kSignalTransient, config.t_predict);
  } catch (const DivergenceError& e) {
    throw GenerationError("training signal for " + sys.name() + " (seed " + std::to_string(seed) +
                          ") diverged: " + e.what());
  }
  sig.trajectory.t0 = 0.0;
  sig.trajectory.samples.colwise() += Vec(sys.shift);
  sig.t_listen = config.t_listen;
  sig.t_train = config.t_train;
  sig.t_predict = config.t_predict;
  sig.source = sys;
  return sig;
}

Vec3 halvorsen_overlap_shift(double tau) {
  const Trajectory lor = settle_and_record(SourceSystem::lorenz(), SourceSystem::lorenz().default_initial_state(),
                                           tau, kSignalTransient, 200.0);
  const Trajectory hal = settle_and_record(SourceSystem::halvorsen(),
                                           SourceSystem::halvorsen().default_initial_state(), tau,
                                           kSignalTransient, 200.0);
  return Vec3(lor.samples.rowwise().mean() - hal.samples.rowwise().mean());
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << 't';
  for (Index k = 0; k < traj.dim(); ++k) os << ",x" << (k + 1);
  os << '\n';
  char buf[32];
  for (Index i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.time(i));
    os << buf;
    for (Index k = 0; k < traj.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", traj.samples(k, i));
      os << ',' << buf;
    }
    os << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_trajectory_csv(os, traj);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != 't')
    throw Error("trajectory CSV: missing header 't,x1,...'");
  Index dim = 0;
  for (char c : line)
    if (c == ',') ++dim;
  if (dim < 1) throw Error("trajectory CSV: header has no state columns");

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Index col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::strtod(cell.c_str(), nullptr);
      if (col == 0)
        times.push_back(v);
      else
        values.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw Error("trajectory CSV: row has " + std::to_string(col) + " cells");
  }
  Trajectory traj;
  const auto n = static_cast<Index>(times.size());
  traj.samples = Eigen::Map<Mat>(values.data(), dim, n);
  if (n > 0) traj.t0 = times.front();
  if (n > 1) traj.tau = (times.back() - times.front()) / static_cast<double>(n - 1);
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_trajectory_csv(is);
}

}  // namespace confab
