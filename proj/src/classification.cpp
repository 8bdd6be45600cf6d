#include "confab/classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace confab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WingLine fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  Mat A(static_cast<Index>(x.size()), 2);
  Vec rhs(static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(static_cast<Index>(i), 0) = x[i];
    A(static_cast<Index>(i), 1) = 1.0;
    rhs(static_cast<Index>(i)) = y[i];
  }
  const Vec c = A.colPivHouseholderQr().solve(rhs);
  return {c(0), c(1)};
}

double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      double best = kInf;
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

void require_window(const Trajectory& window, const ClassifierParams& params) {
  if (window.size() < 3 || window.duration() + 1e-9 < params.min_window)
    throw InsufficientDataError("classification window of " + std::to_string(window.duration()) +
                                " model units is shorter than " + std::to_string(params.min_window));
}

}  // namespace

const char* to_string(C1Class c) {
  switch (c) {
    case C1Class::fixed_point: return "fixed_point";
    case C1Class::limit_cycle: return "limit_cycle";
    case C1Class::aperiodic: return "aperiodic";
  }
  return "?";
}

const char* to_string(Label l) {
  switch (l) {
    case Label::good_recon: return "GoodRecon";
    case Label::poor_recon: return "PoorRecon";
    case Label::ua_preliminary: return "UA_preliminary";
    case Label::needs_manual_review: return "NeedsManualReview";
  }
  return "?";
}

C1Class c1_class_from_string(const std::string& s) {
  for (auto c : {C1Class::fixed_point, C1Class::limit_cycle, C1Class::aperiodic})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown C1 class '" + s + "'");
}

Label label_from_string(const std::string& s) {
  for (auto l : {Label::good_recon, Label::poor_recon, Label::ua_preliminary, Label::needs_manual_review})
    if (s == to_string(l)) return l;
  throw ConfigError("unknown label '" + s + "'");
}

Box Box::lorenz_default() {
  Box b;
  b.lo = Eigen::Vector3d(-22.0, -32.0, 0.0);
  b.hi = Eigen::Vector3d(22.0, 32.0, 55.0);
  return b;
}

bool Box::contains(const Eigen::Ref<const Vec>& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

ReferenceFit fit_reference(const Trajectory& ground_truth, const Box& box, double alpha, int min_per_wing) {
  const ExtremaSeries m = local_extrema(ground_truth, 2, ExtremumKind::maxima, 0);
  std::vector<double> xp, yp, xn, yn;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.companion_values[i] > 0.0) {
      xp.push_back(m.companion_values[i]);
      yp.push_back(m.values[i]);
    } else {
      xn.push_back(m.companion_values[i]);
      yn.push_back(m.values[i]);
    }
  }
  const auto need = static_cast<std::size_t>(min_per_wing);
  if (xp.size() < need || xn.size() < need)
    throw InsufficientDataError("fit_reference: wings have " + std::to_string(xp.size()) + " and " +
                                std::to_string(xn.size()) + " maxima, need " + std::to_string(min_per_wing) +
                                " each");
  ReferenceFit ref;
  ref.positive = fit_line(xp, yp);
  ref.negative = fit_line(xn, yn);
  ref.box = box;
  ref.alpha = alpha;
  return ref;
}

int minimal_period(const std::vector<double>& v, double tol, int max_p, int min_reps) {
  const auto n = static_cast<int>(v.size());
  for (int p = 1; p <= max_p; ++p) {
    if (n < min_reps * p) break;
    bool ok = true;
    for (int i = 0; i + p < n && ok; ++i) ok = std::abs(v[static_cast<std::size_t>(i + p)] - v[static_cast<std::size_t>(i)]) < tol;
    if (ok) return p;
  }
  return 0;
}

C1Result detect_c1(const Trajectory& window, const ClassifierParams& params) {
  require_window(window, params);
  const Vec range = window.samples.rowwise().maxCoeff() - window.samples.rowwise().minCoeff();
  if (range.maxCoeff() < params.eps_fp) return {C1Class::fixed_point, 0};

  // A flat x3 (e.g. a planar orbit) gives no maxima; fall back to the widest coordinate.
  Index coord = params.periodic_coord;
  if (coord >= window.dim() || range(coord) < params.eps_fp) range.maxCoeff(&coord);
  const ExtremaSeries m = local_extrema(window, coord, ExtremumKind::maxima);
  // Too few oscillations over the window: a slow drift onto an equilibrium.
  if (m.size() < 3) return {C1Class::fixed_point, 0};
  const int p = minimal_period(m.values, params.eps_per, params.max_period, 2);
  if (p > 0) return {C1Class::limit_cycle, p};
  return {C1Class::aperiodic, 0};
}

bool detect_c2(const Trajectory& window, const Box& box) {
  for (Index i = 0; i < window.size(); ++i)
    if (!box.contains(window.samples.col(i))) return false;
  return true;
}

C3Result c3_distances(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params) {
  C3Result out;
  const ExtremaSeries m = local_extrema(window, 2, ExtremumKind::maxima, 0);
  out.max_distance = m.empty() ? kInf : 0.0;
  bool all_close = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x1 = m.companion_values[i];
    const WingLine& line = x1 > 0.0 ? ref.positive : ref.negative;
    (x1 > 0.0 ? out.positive_maxima : out.negative_maxima)++;
    const double d = std::abs(m.values[i] - line.at(x1));
    out.max_distance = std::max(out.max_distance, d);
    if (!(d < ref.alpha)) all_close = false;
  }
  const auto need = static_cast<std::size_t>(params.min_wing_maxima);
  out.pass = all_close && out.positive_maxima >= need && out.negative_maxima >= need;
  return out;
}

bool detect_c3(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params) {
  return c3_distances(window, ref, params).pass;
}

ClassLabel classify_output(const Trajectory& window, const ReferenceFit& ref, const ClassifierParams& params) {
  ClassLabel out;
  const C1Result c1 = detect_c1(window, params);
  out.c1 = c1.cls;
  out.period = c1.period;
  out.c2 = detect_c2(window, ref.box);
  const C3Result c3 = c3_distances(window, ref, params);
  out.c3 = c3.pass;
  out.max_c3_distance = c3.max_distance;
  if (c1.cls != C1Class::aperiodic)
    out.value = Label::ua_preliminary;
  else if (out.c2 && out.c3)
    out.value = Label::good_recon;
  else if (out.c2)
    out.value = Label::poor_recon;
  else
    out.value = Label::needs_manual_review;
  return out;
}

PeriodCount count_period(const std::vector<double>& values, const PeriodParams& params) {
  if (values.size() < 3)
    throw InsufficientDataError("count_period: " + std::to_string(values.size()) + " extrema, need at least 3");
  const int p = minimal_period(values, params.tol, params.max_period, params.min_cycles);
  return {p > 0, p};
}

PeriodCount count_period(const Trajectory& window, Index coord, ExtremumKind kind, const PeriodParams& params) {
  return count_period(local_extrema(window, coord, kind).values, params);
}

std::vector<double> cluster_centers(std::vector<double> values, double tol) {
  std::vector<double> out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  double sum = values.front();
  std::size_t n = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] - values[i - 1] >= tol) {
      out.push_back(sum / static_cast<double>(n));
      sum = 0.0;
      n = 0;
    }
    sum += values[i];
    ++n;
  }
  out.push_back(sum / static_cast<double>(n));
  return out;
}

ExtremaSignature make_signature(const Trajectory& window, const C1Result& c1, const SignatureParams& params) {
  ExtremaSignature s;
  s.coordinate_index = params.coord;
  s.kind = params.kind;
  s.c1 = c1.cls;
  s.period = c1.period;
  s.mean = window.samples.rowwise().mean();
  s.lo = window.samples.rowwise().minCoeff();
  s.hi = window.samples.rowwise().maxCoeff();

  if (c1.cls == C1Class::fixed_point) {
    s.tolerance = params.cluster_tol;
    s.values = {s.mean(params.coord)};
    s.centers = s.values;
    return s;
  }
  const ExtremaSeries ex = local_extrema(window, params.coord, params.kind);
  s.values = ex.values;
  if (c1.cls == C1Class::limit_cycle) {
    // The C1 period may come from another coordinate; recount on this one.
    const int p = minimal_period(ex.values, params.period_tol, params.max_period, 2);
    if (p > 0) {
      s.period = p;
      s.values.assign(ex.values.end() - p, ex.values.end());
    }
    s.tolerance = params.period_tol;
    s.centers = cluster_centers(s.values, params.period_tol);
  } else {
    s.tolerance = params.cluster_tol;
    s.centers = cluster_centers(s.values, params.cluster_tol);
  }
  return s;
}

bool signatures_match(const ExtremaSignature& a, const ExtremaSignature& b, const MatchParams& params) {
  if (a.c1 != b.c1 || a.mean.size() != b.mean.size()) return false;
  switch (a.c1) {
    case C1Class::fixed_point:
      return (a.mean - b.mean).cwiseAbs().maxCoeff() <= params.position_tol;
    case C1Class::limit_cycle:
      return a.period == b.period && hausdorff(a.centers, b.centers) <= params.position_tol &&
             (a.lo - b.lo).cwiseAbs().maxCoeff() <= params.position_tol &&
             (a.hi - b.hi).cwiseAbs().maxCoeff() <= params.position_tol;
    case C1Class::aperiodic:
      for (Index k = 0; k < a.mean.size(); ++k) {
        const double span = std::max(a.hi(k) - a.lo(k), b.hi(k) - b.lo(k));
        const double tol = params.aperiodic_rel * span;
        if (std::abs(a.lo(k) - b.lo(k)) > tol || std::abs(a.hi(k) - b.hi(k)) > tol ||
            std::abs(a.mean(k) - b.mean(k)) > tol)
          return false;
      }
      return true;
  }
  return false;
}

double signature_distance(const ExtremaSignature& a, const ExtremaSignature& b) {
  double d = hausdorff(a.centers, b.centers);
  if (a.c1 == C1Class::fixed_point && b.c1 == C1Class::fixed_point && a.mean.size() == b.mean.size())
    d = std::max(d, (a.mean - b.mean).cwiseAbs().maxCoeff());
  return d;
}

std::uint64_t signature_hash(const ExtremaSignature& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::int64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint64_t>(v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<std::int64_t>(s.c1));
  mix(s.period);
  mix(s.coordinate_index);
  if (s.c1 == C1Class::aperiodic) {
    for (Index k = 0; k < s.lo.size(); ++k) {
      mix(std::llround(s.lo(k)));
      mix(std::llround(s.hi(k)));
    }
  } else {
    for (double c : s.centers) mix(std::llround(c * 100.0));
  }
  return h;
}

std::vector<AttractorRecord> dedup_attractors(const std::vector<ClassifiedOutput>& outputs,
                                              const MatchParams& params) {
  std::vector<AttractorRecord> records;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& o = outputs[i];
    auto it = std::find_if(records.begin(), records.end(), [&](const AttractorRecord& r) {
      return r.label.c1 == o.label.c1 && signatures_match(r.signature, o.signature, params);
    });
    if (it == records.end()) {
      records.push_back({o.label, o.signature, o.window, o.final_state, 0, {}});
      it = records.end() - 1;
    }
    ++it->count;
    it->members.push_back(i);
  }
  return records;
}

int assign_scenario(const std::vector<AttractorRecord>& records) {
  bool good = false, poor = false, ua = false;
  for (const auto& r : records) {
    switch (r.label.value) {
      case Label::good_recon: good = true; break;
      case Label::poor_recon: poor = true; break;
      case Label::ua_preliminary: ua = true; break;
      case Label::needs_manual_review: (r.label.c3 ? poor : ua) = true; break;
    }
  }
  if (!good && !poor) return 3;
  if (good) return ua ? 4 : 1;
  return ua ? 5 : 2;
}

}  // namespace confab
