#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "confab/continuation.hpp"
#include "confab/io.hpp"
#include "confab/outcome.hpp"
#include "confab/training.hpp"

namespace confab {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class TaskKind { task1, task2, task2_multi, task3 };

const char* to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

struct TrainedAttractor {
  SourceSystem system;
  double b = 0.0;
};

struct TaskSpec {
  TaskKind task = TaskKind::task1;
  RCConfig config;
  std::uint64_t base_seed = 1;
  std::string out_dir;  // empty: nothing is written
  int threads = 1;
  bool long_transient = false;
  bool plots = true;

  // task1
  std::vector<double> rho_grid;
  int n_matrices = 50;
  std::size_t n_ic = 100;
  bool include_warm_start = false;
  bool fine_sweep = false;
  int fine_matrix = 0;
  double fine_rho_lo = 0.0;
  double fine_rho_hi = 1.0;
  double fine_rho_step = 0.005;

  // task2 / task2_multi / task3
  std::vector<TrainedAttractor> attractors;
  double sweep_lo = -0.42;
  double sweep_hi = 0.42;
  double sweep_step = 0.002;
  double t_settle = 70.0;
  double t_measure = 130.0;
  bool track_uas = true;
  std::size_t n_ic_ua = 20;
  int max_ua_tracks = 4;
  /// Consecutive network seeds tried until every trained attractor is
  /// reconstructed.
  int seed_attempts = 30;
  /// Extra closed-loop time over which a reconstruction must persist.
  double confirm_time = 500.0;

  /// Paper settings per task. `b` is the bias magnitude of the pair tasks;
  /// `n_attractors` (3 or 5) selects the task2_multi variant.
  static TaskSpec defaults(TaskKind kind, double b = 0.0, int n_attractors = 3);

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const TaskSpec& spec);
/// Keys present in j override spec. Accepts a run manifest (reads its "spec").
void update_from_json(const nlohmann::json& j, TaskSpec& spec);
/// Defaults for the task named in the file (or `fallback`), then the file.
TaskSpec load_task_spec(const std::string& path, TaskKind fallback);

/// Everything needed to reproduce a run, including the gap-filling decisions
/// in force.
nlohmann::json run_manifest(const TaskSpec& spec);

struct Task1Result {
  EnsembleResult ensemble;
  std::vector<Branch> fine_branches;
};

struct Reconstruction {
  int attractor_id = 0;
  std::string source;
  double b = 0.0;
  int expected_period = 0;  // 0 for aperiodic sources
  C1Result c1;
  bool reconstructed = false;
  ExtremaSignature signature;
  Vec final_state;
};

struct BiasTaskResult {
  Network net;
  Readout readout;
  double residual_rms = 0.0;
  std::uint64_t network_seed = 0;
  int seeds_tried = 0;
  bool all_reconstructed = false;
  std::vector<Reconstruction> reconstructions;
  std::vector<Branch> branches;
  std::vector<int> family_branch;  // per attractor: id of its tracked family, -1 if not tracked
  std::optional<GapAnalysis> gap;  // task3 only
};

Task1Result run_task1(const TaskSpec& spec);
/// task2 and task2_multi.
BiasTaskResult run_task2(const TaskSpec& spec);
BiasTaskResult run_task3(const TaskSpec& spec);

/// Extremum series that the bias tasks emit: x2 minima for Sprott, x1 minima
/// otherwise.
SignatureParams bias_task_signature(TaskKind kind);

/// Writes CSVs, manifest and (if enabled) plots under spec.out_dir.
void write_task1_outputs(const TaskSpec& spec, const Task1Result& result);
void write_bias_task_outputs(const TaskSpec& spec, const BiasTaskResult& result);

}  // namespace confab
