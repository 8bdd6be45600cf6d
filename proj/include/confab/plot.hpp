#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "confab/continuation.hpp"

namespace confab {

struct PlotText {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Parameter-vs-extremum scatter, one <g> layer per label. Branches with one
/// value per parameter are drawn as polylines, others as dots.
void write_branches_svg(std::ostream& os, const std::vector<BifurcationRow>& rows, const PlotText& text);

/// Scenario frequency against rho, one polyline per scenario.
void write_ensemble_svg(std::ostream& os, const EnsembleResult& result, const PlotText& text);

}  // namespace confab
