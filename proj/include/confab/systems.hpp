#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "confab/config.hpp"
#include "confab/numerics.hpp"

namespace confab {

using Vec3 = Eigen::Vector3d;

/// Lorenz with the standard dissipative first component 10 (x2 - x1).
Vec3 lorenz_rhs(const Vec3& x);
Vec3 sprott_rhs(const Vec3& x, double a);
Vec3 halvorsen_rhs(const Vec3& x);

enum class SystemKind { lorenz, sprott, halvorsen };

const char* to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& s);

/// One of the three ground-truth systems. `a` is only used by Sprott;
/// `shift` is added to the native state when a signal is recorded.
struct SourceSystem {
  SystemKind kind = SystemKind::lorenz;
  double a = 27.0;
  Vec3 shift = Vec3::Zero();

  static SourceSystem lorenz() { return {SystemKind::lorenz, 0.0, Vec3::Zero()}; }
  static SourceSystem sprott(double a) { return {SystemKind::sprott, a, Vec3::Zero()}; }
  static SourceSystem halvorsen(const Vec3& shift = Vec3::Zero()) { return {SystemKind::halvorsen, 0.0, shift}; }

  std::string name() const;
  VectorField field() const;
  /// Native (unshifted) initial state used before the discarded transient.
  Vec3 default_initial_state() const;
};

/// Length of the transient discarded before a signal is recorded.
inline constexpr double kSignalTransient = 100.0;

struct TrainingSignal {
  Trajectory trajectory;  // u(t) for t in [0, t_predict], spacing tau
  double t_listen = 0.0;
  double t_train = 0.0;
  double t_predict = 0.0;
  SourceSystem source;
};

/// Integrates `sys` from its default state (seed 0) or a seeded perturbation of
/// it, discards kSignalTransient, applies the shift and records t_predict/tau + 1
/// samples. Throws GenerationError on divergence.
TrainingSignal generate_training_signal(const SourceSystem& sys, const RCConfig& config, std::uint64_t seed = 0);

/// Post-transient native trajectory of `sys` from `x0` over `duration`.
Trajectory settle_and_record(const SourceSystem& sys, const Vec3& x0, double tau, double transient, double duration);

/// Lorenz centroid minus Halvorsen centroid over 200-unit post-transient
/// reference trajectories.
Vec3 halvorsen_overlap_shift(double tau);

/// CSV with header t,x1,...,xD and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace confab
