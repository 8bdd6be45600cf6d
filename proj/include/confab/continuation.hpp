#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "confab/classification.hpp"
#include "confab/reservoir.hpp"
#include "confab/systems.hpp"

namespace confab {

struct FlowRun {
  Trajectory window;  // projected samples of the measured part
  Vec final_state;
};

/// An autonomous system with an output projection, integrated by RK4.
class Flow {
 public:
  virtual ~Flow() = default;
  virtual Index state_dim() const = 0;
  /// Runs from x0 for discard + measure and returns the last `measure` units
  /// of the projection. Throws DivergenceError on a non-finite state.
  virtual FlowRun run(const Vec& x0, double tau, double discard, double measure) const = 0;
};

/// Closed-loop reservoir with the readout as projection.
class ReservoirFlow final : public Flow {
 public:
  explicit ReservoirFlow(ClosedLoop loop) : loop_(std::move(loop)) {}
  Index state_dim() const override { return loop_.state_dim(); }
  FlowRun run(const Vec& x0, double tau, double discard, double measure) const override;
  const ClosedLoop& loop() const { return loop_; }

 private:
  ClosedLoop loop_;
};

/// Generic vector field; an empty projection means the identity.
class FieldFlow final : public Flow {
 public:
  explicit FieldFlow(VectorField f, std::function<Vec(const Vec&)> projection = {})
      : f_(std::move(f)), projection_(std::move(projection)) {}
  Index state_dim() const override { return f_.dimension; }
  FlowRun run(const Vec& x0, double tau, double discard, double measure) const override;

 private:
  VectorField f_;
  std::function<Vec(const Vec&)> projection_;
};

/// Maps a parameter value to the flow at that value.
using FlowFamily = std::function<std::unique_ptr<Flow>(double)>;

/// Flows of the closed loop with bias b * 1.
FlowFamily bias_family(const Network& net, const Readout& readout, const RCConfig& config);

enum class WarmStart { previous_attractor_point, fixed_state };

struct SweepPlan {
  std::string parameter = "b";
  double start = 0.0;
  double stop = 0.0;
  double step = 0.002;
  WarmStart warm_start = WarmStart::previous_attractor_point;
  double t_settle = 70.0;
  double t_measure = 130.0;
  double tau = 0.01;
  double jump_tol = 0.5;
  Index coord = 2;
  ExtremumKind kind = ExtremumKind::maxima;

  /// Throws ConfigError for a zero step, a step pointing away from stop, or
  /// non-positive budgets.
  void validate() const;
  /// start, start + step, ... without passing stop.
  std::vector<double> values() const;
};

struct BranchPoint {
  double param = 0.0;
  C1Result c1;
  ExtremaSignature signature;
  std::string label;
  Vec state;  // final state of the measured run
};

struct Branch {
  int id = 0;
  int parent = -1;     // branch this one succeeded after a loss, or -1
  std::string family;  // e.g. "GA", "UA"
  std::vector<BranchPoint> points;
  bool lost = false;
  double lost_at = 0.0;

  double lo() const;
  double hi() const;
  bool alive_at(double p, double tol) const;
};

/// Optional relabelling of every point, e.g. by the full C1-C3 classifier.
using PointLabeler = std::function<std::string(const Trajectory& window, const C1Result& c1)>;

struct SweepOptions {
  ClassifierParams classifier;
  double cluster_tol = 0.05;
  double period_tol = 1e-3;
  PointLabeler labeler;
  /// Stop after this many successor branches (0 = follow to the end).
  int max_successors = 0;
};

/// Warm-started sweep over plan.values() from seed_state. A step whose
/// signature jumps by more than plan.jump_tol, also after one retry with
/// doubled t_settle, ends the branch (lost_at = that parameter) and the state
/// reached there starts a new branch with parent set. Branch ids are
/// first_id, first_id + 1, ...
std::vector<Branch> sweep_branch(const FlowFamily& family, const SweepPlan& plan, const Vec& seed_state,
                                 const SweepOptions& options = {}, int first_id = 0);

/// Loss test between consecutive sweep points. Two aperiodic outputs continue
/// each other when their extents and means agree as in dedup (a chaotic
/// band's extremum distribution is too noisy for a fixed tolerance); any
/// other pair needs signature_distance <= jump_tol.
bool continues(const ExtremaSignature& a, const ExtremaSignature& b, double jump_tol, const MatchParams& match = {});

/// Both directions from an attractor at p0 within [lo, hi]. The two
/// seed-connected halves are joined into the first returned branch (ascending
/// parameter order); successors follow.
std::vector<Branch> track_family(const FlowFamily& family, const SweepPlan& base, const Vec& seed_state, double p0,
                                 double lo, double hi, const SweepOptions& options, int first_id);

struct BifurcationRow {
  double param;
  double value;
  int branch_id;
  std::string label;
  ExtremumKind kind;
  Index coord;
};

/// One row per stored extremum value of every point.
std::vector<BifurcationRow> emit_bifurcation_data(const std::vector<Branch>& branches, Index coord, ExtremumKind kind);

/// Per-IC seeds: state j is drawn uniformly from [-1, 1]^N with seed ic_seed + j.
std::vector<Vec> draw_initial_states(Index N, std::size_t n_ic, std::uint64_t ic_seed);

struct BasinRun {
  double tau = 0.01;
  double settle = 70.0;
  double measure = 30.0;
};

using OutputClassifier = std::function<ClassifiedOutput(Trajectory window)>;

/// Runs one flow from every state and classifies each output. Output i belongs
/// to state i in both versions.
std::vector<ClassifiedOutput> basin_outputs_serial(const Flow& flow, const std::vector<Vec>& states,
                                                   const BasinRun& run, const OutputClassifier& classify);
std::vector<ClassifiedOutput> basin_outputs_parallel(const Flow& flow, const std::vector<Vec>& states,
                                                     const BasinRun& run, const OutputClassifier& classify,
                                                     int threads);

/// The C1-C3 classifier with an x3-maxima signature.
OutputClassifier reference_classifier(const ReferenceFit& ref, const ClassifierParams& params = {});

/// Basin sampling of the closed loop with the reference classifier and dedup.
std::vector<AttractorRecord> basin_sample(const Network& net, const Readout& readout, const Vec& bias,
                                          const RCConfig& config, std::size_t n_ic, std::uint64_t ic_seed,
                                          const ReferenceFit& ref, int threads = 1);

struct EnsembleSpec {
  RCConfig base = RCConfig::task1();
  std::vector<double> rho_grid;
  int n_matrices = 10;
  std::uint64_t base_seed = 1;
  std::size_t n_ic = 30;
  /// Also classify the run started from r(t_train).
  bool include_warm_start = false;
  ClassifierParams classifier;
};

struct EnsembleCell {
  int matrix_id = 0;
  std::size_t rho_index = 0;
  double rho = 0.0;
  int scenario = 0;  // 0 when the cell failed
  std::string error;
  std::vector<ClassLabel> ic_labels;
  std::vector<std::uint64_t> ic_hashes;
  std::vector<AttractorRecord> records;
};

struct EnsembleResult {
  std::vector<double> rho_grid;
  std::vector<EnsembleCell> cells;  // matrix-major, then rho index
  /// Scenario counts per rho; failed cells are not counted.
  std::vector<std::array<int, 5>> table() const;
};

/// Seeds derived from spec: matrix i uses network_seed = base_seed + i and
/// IC j uses base_seed * 10^6 + j; W_in comes from base.seeds.input_seed.
std::uint64_t matrix_seed(std::uint64_t base_seed, int matrix_id);
std::uint64_t ic_seed_base(std::uint64_t base_seed);

/// Shared preparation: Lorenz signal and its reference fit.
struct GroundTruth {
  TrainingSignal signal;
  ReferenceFit ref;
};
GroundTruth lorenz_ground_truth(const RCConfig& config);

/// Everything the cells of one ensemble share.
struct EnsembleInputs {
  GroundTruth truth;
  Mat W_in;
  std::vector<Mat> raw_M;  // unscaled, one per matrix
  std::vector<std::uint64_t> m_seeds;
};
EnsembleInputs prepare_ensemble(const EnsembleSpec& spec);

/// One (matrix, rho) cell: rescale, train, basin-sample, assign the scenario.
/// Failures are logged and returned with scenario 0.
EnsembleCell ensemble_cell(const EnsembleSpec& spec, const EnsembleInputs& in, int matrix_id, std::size_t rho_index);

EnsembleResult scenario_ensemble_serial(const EnsembleSpec& spec);
EnsembleResult scenario_ensemble_parallel(const EnsembleSpec& spec, int threads);

}  // namespace confab
