#include "confab/outcome.hpp"

#include <algorithm>
#include <cmath>

namespace confab {

const char* to_string(GapOutcome o) {
  switch (o) {
    case GapOutcome::ua_coexistence: return "ua_coexistence";
    case GapOutcome::bistability: return "bistability";
    case GapOutcome::continuous_transition: return "continuous_transition";
  }
  return "?";
}

GapAnalysis classify_gap_filling(const Branch& lower, const Branch& upper, double b_lower, double b_upper,
                                 double step) {
  GapAnalysis g;
  const double tol = 0.5 * std::abs(step);
  for (const Branch* b : {&lower, &upper}) {
    if (b->alive_at(b_lower, tol) && b->alive_at(b_upper, tol)) {
      g.outcome = GapOutcome::continuous_transition;
      g.spanning_branch = b->id;
      return g;
    }
  }
  if (!lower.points.empty() && !upper.points.empty()) {
    const double lo = std::max({lower.lo(), upper.lo(), std::min(b_lower, b_upper)});
    const double hi = std::min({lower.hi(), upper.hi(), std::max(b_lower, b_upper)});
    if (hi - lo > tol) {
      g.outcome = GapOutcome::bistability;
      g.window_lo = lo;
      g.window_hi = hi;
      return g;
    }
  }
  g.outcome = GapOutcome::ua_coexistence;
  return g;
}

std::vector<int> period_sequence(const Branch& branch) {
  std::vector<const BranchPoint*> pts;
  for (const auto& p : branch.points) pts.push_back(&p);
  std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->param < b->param; });
  std::vector<int> seq;
  for (const auto* p : pts) {
    if (p->signature.c1 != C1Class::limit_cycle || p->signature.period <= 0) continue;
    if (seq.empty() || seq.back() != p->signature.period) seq.push_back(p->signature.period);
  }
  return seq;
}

bool has_period_path(const Branch& branch, const std::vector<int>& pattern) {
  const std::vector<int> seq = period_sequence(branch);
  auto contains = [&](auto first, auto last) {
    auto it = first;
    for (int want : pattern) {
      it = std::find(it, last, want);
      if (it == last) return false;
      ++it;
    }
    return true;
  };
  return contains(seq.begin(), seq.end()) || contains(seq.rbegin(), seq.rend());
}

}  // namespace confab
