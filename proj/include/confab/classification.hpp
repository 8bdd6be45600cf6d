#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confab/numerics.hpp"

namespace confab {

enum class C1Class { fixed_point, limit_cycle, aperiodic };
enum class Label { good_recon, poor_recon, ua_preliminary, needs_manual_review };

const char* to_string(C1Class c);
const char* to_string(Label l);
C1Class c1_class_from_string(const std::string& s);
Label label_from_string(const std::string& s);

struct ClassifierParams {
  double eps_fp = 1e-4;      // componentwise range below which the output is stationary
  double eps_per = 1e-3;     // per-value mismatch for periodic maxima sequences
  int max_period = 16;
  double min_window = 30.0;  // model units
  Index periodic_coord = 2;  // x3 maxima drive the periodicity test
  int min_wing_maxima = 5;
};

/// Closed, axis-aligned box in the projected space.
struct Box {
  Vec lo;
  Vec hi;
  /// -22 <= x1 <= 22, -32 <= x2 <= 32, 0 <= x3 <= 55.
  static Box lorenz_default();
  bool contains(const Eigen::Ref<const Vec>& x) const;
};

struct WingLine {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double x1) const { return slope * x1 + intercept; }
};

/// Lines through the (x1, x3) positions of x3 maxima of a reference
/// trajectory, one per sign of x1, plus the admissible box.
struct ReferenceFit {
  WingLine positive;
  WingLine negative;
  Box box = Box::lorenz_default();
  double alpha = 3.75;
};

/// Least-squares wing lines from a post-transient ground-truth trajectory.
/// Throws InsufficientDataError when a wing has fewer than min_per_wing maxima.
ReferenceFit fit_reference(const Trajectory& ground_truth, const Box& box = Box::lorenz_default(), double alpha = 3.75,
                           int min_per_wing = 10);

/// Smallest p <= max_p with |v[i + p] - v[i]| < tol for every i, seen at least
/// min_reps times; 0 when there is none.
int minimal_period(const std::vector<double>& v, double tol, int max_p, int min_reps);

struct C1Result {
  C1Class cls = C1Class::aperiodic;
  int period = 0;  // limit cycles only
};

C1Result detect_c1(const Trajectory& window, const ClassifierParams& params = {});
bool detect_c2(const Trajectory& window, const Box& box);

struct C3Result {
  bool pass = false;
  double max_distance = 0.0;  // over all maxima, infinity when there are none
  std::size_t positive_maxima = 0;
  std::size_t negative_maxima = 0;
};

C3Result c3_distances(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params = {});
bool detect_c3(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params = {});

struct ClassLabel {
  Label value = Label::needs_manual_review;
  C1Class c1 = C1Class::aperiodic;
  int period = 0;
  bool c2 = false;
  bool c3 = false;
  double max_c3_distance = 0.0;
};

/// C1 first, then C2 and C3. `window` is the output after t_trans.
/// Throws InsufficientDataError if the window is shorter than params.min_window.
ClassLabel classify_output(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params = {});

struct PeriodCount {
  bool periodic = false;
  int period = 0;
};

struct PeriodParams {
  double tol = 1e-3;
  int max_period = 16;
  int min_cycles = 3;
};

/// Period of the extrema-value sequence of one coordinate.
/// Throws InsufficientDataError when there are fewer than three extrema.
PeriodCount count_period(const Trajectory& window, Index coord, ExtremumKind kind, const PeriodParams& params = {});
PeriodCount count_period(const std::vector<double>& extremum_values, const PeriodParams& params = {});

/// Clusters sorted values; a new cluster starts when the gap to the previous
/// value reaches tol. Returns cluster means.
std::vector<double> cluster_centers(std::vector<double> values, double tol);

/// Dedup and branch-matching key of one post-transient output.
struct ExtremaSignature {
  Index coordinate_index = 2;
  ExtremumKind kind = ExtremumKind::maxima;
  C1Class c1 = C1Class::aperiodic;
  int period = 0;
  double tolerance = 0.0;
  std::vector<double> centers;  // sorted cluster centers
  std::vector<double> values;   // every extremum value in the window, or the coordinate value of a fixed point
  Vec mean;
  Vec lo;
  Vec hi;
};

struct SignatureParams {
  Index coord = 2;
  ExtremumKind kind = ExtremumKind::maxima;
  double cluster_tol = 0.05;
  double period_tol = 1e-3;
  int max_period = 16;
};

/// The c1 class and period are taken from `c1` (computed by the caller).
ExtremaSignature make_signature(const Trajectory& window, const C1Result& c1, const SignatureParams& params = {});

struct MatchParams {
  double position_tol = 0.05;
  double aperiodic_rel = 0.25;
};

/// Same attractor: same C1 class and matching positions (fixed points), period
/// and cycle values (limit cycles) or extents and means (aperiodic).
bool signatures_match(const ExtremaSignature& a, const ExtremaSignature& b, const MatchParams& params = {});

/// Hausdorff distance between the center sets, also covering the mean position
/// when both are fixed points. Infinity when exactly one set is empty.
double signature_distance(const ExtremaSignature& a, const ExtremaSignature& b);

/// FNV-1a over the class, period and rounded centers.
std::uint64_t signature_hash(const ExtremaSignature& s);

struct ClassifiedOutput {
  Trajectory window;
  ClassLabel label;
  ExtremaSignature signature;
  Vec final_state;  // state at the end of the window, if known
};

struct AttractorRecord {
  ClassLabel label;
  ExtremaSignature signature;
  Trajectory representative;
  Vec state;  // final state of the representative run
  std::size_t count = 0;
  std::vector<std::size_t> members;  // indices into the input list
};

/// Greedy merge in input order: each output joins the first record with the
/// same C1 class and a matching signature.
std::vector<AttractorRecord> dedup_attractors(const std::vector<ClassifiedOutput>& outputs,
                                              const MatchParams& params = {});

/// Table-1 scenario 1..5. Manual-review records count as a poor reconstruction
/// when they pass C3 and as an untrained attractor otherwise.
int assign_scenario(const std::vector<AttractorRecord>& records);

}  // namespace confab
