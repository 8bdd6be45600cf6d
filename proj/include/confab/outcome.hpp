#pragma once

#include <string>
#include <vector>

#include "confab/continuation.hpp"

namespace confab {

/// How the closed loop fills the parameter range between two trained
/// attractors.
enum class GapOutcome { ua_coexistence, bistability, continuous_transition };

const char* to_string(GapOutcome o);

struct GapAnalysis {
  GapOutcome outcome = GapOutcome::ua_coexistence;
  /// Overlap of the two families' alive ranges (bistability only).
  double window_lo = 0.0;
  double window_hi = 0.0;
  /// Id of the branch that spans both trained values (continuous transition only).
  int spanning_branch = -1;
};

/// `lower` is the family tracked from the attractor trained at b_lower, `upper`
/// the one from b_upper. In order: a family alive at both trained values is a
/// continuous transition; alive ranges overlapping by at least one step are a
/// bistability window; otherwise the gap is filled by other attractors.
GapAnalysis classify_gap_filling(const Branch& lower, const Branch& upper, double b_lower, double b_upper,
                                 double step);

/// Period counts along a branch in ascending parameter order, with repeats
/// and non-periodic points dropped.
std::vector<int> period_sequence(const Branch& branch);

/// True when `pattern` appears in order (not necessarily adjacent) in the
/// branch's period sequence, read in either direction.
bool has_period_path(const Branch& branch, const std::vector<int>& pattern);

}  // namespace confab
