#include "confab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

namespace confab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axes {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  void fit(double xa, double xb, double ya, double yb) {
    x0 = xa, x1 = xb, y0 = ya, y1 = yb;
    if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
    if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

void header(std::ostream& os, const Axes& ax, const PlotText& text) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
     << kHeight - 2 * kMargin << "\"/>\n</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = ax.x0 + (ax.x1 - ax.x0) * k / 4.0;
    const double yv = ax.y0 + (ax.y1 - ax.y0) * k / 4.0;
    os << "<text x=\"" << num(ax.px(xv)) << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">"
       << num(xv) << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(ax.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(text.title) << "</text>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
     << escape(text.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2
     << ")\">" << escape(text.y_label) << "</text>\n";
}

}  // namespace

void write_branches_svg(std::ostream& os, const std::vector<BifurcationRow>& rows, const PlotText& text) {
  Axes ax;
  if (!rows.empty()) {
    double xa = std::numeric_limits<double>::infinity(), xb = -xa, ya = xa, yb = -xa;
    for (const auto& r : rows) {
      xa = std::min(xa, r.param), xb = std::max(xb, r.param);
      ya = std::min(ya, r.value), yb = std::max(yb, r.value);
    }
    ax.fit(xa, xb, ya, yb);
  }
  header(os, ax, text);

  std::map<std::string, std::map<int, std::vector<const BifurcationRow*>>> layers;
  for (const auto& r : rows) layers[r.label][r.branch_id].push_back(&r);

  std::size_t colour = 0;
  double legend_y = kMargin + 14;
  for (const auto& [label, branches] : layers) {
    const char* c = kPalette[colour++ % std::size(kPalette)];
    os << "<g class=\"layer\" data-label=\"" << escape(label) << "\" fill=\"" << c << "\" stroke=\"" << c << "\">\n";
    for (const auto& [id, pts] : branches) {
      std::map<double, int> per_param;
      for (const auto* p : pts) ++per_param[p->param];
      const bool single = std::all_of(per_param.begin(), per_param.end(), [](auto& kv) { return kv.second == 1; });
      if (single && pts.size() > 1) {
        std::vector<const BifurcationRow*> sorted = pts;
        std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->param < b->param; });
        os << "<polyline data-branch=\"" << id << "\" fill=\"none\" points=\"";
        for (const auto* p : sorted) os << num(ax.px(p->param)) << ',' << num(ax.py(p->value)) << ' ';
        os << "\"/>\n";
      } else {
        for (const auto* p : pts)
          os << "<circle data-branch=\"" << id << "\" cx=\"" << num(ax.px(p->param)) << "\" cy=\""
             << num(ax.py(p->value)) << "\" r=\"0.8\" stroke=\"none\"/>\n";
      }
    }
    os << "</g>\n";
    os << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" fill=\"" << c
       << "\">" << escape(label) << "</text>\n";
    legend_y += 14;
  }
  os << "</svg>\n";
}

void write_ensemble_svg(std::ostream& os, const EnsembleResult& result, const PlotText& text) {
  const auto table = result.table();
  Axes ax;
  double ymax = 1.0;
  for (const auto& row : table)
    for (int v : row) ymax = std::max(ymax, static_cast<double>(v));
  if (!result.rho_grid.empty())
    ax.fit(*std::min_element(result.rho_grid.begin(), result.rho_grid.end()),
           *std::max_element(result.rho_grid.begin(), result.rho_grid.end()), 0.0, ymax);
  header(os, ax, text);
  for (std::size_t s = 0; s < 5; ++s) {
    const char* c = kPalette[s];
    os << "<g class=\"layer\" data-label=\"scenario" << s + 1 << "\" stroke=\"" << c << "\" fill=\"" << c << "\">\n";
    os << "<polyline fill=\"none\" points=\"";
    for (std::size_t k = 0; k < table.size(); ++k)
      os << num(ax.px(result.rho_grid[k])) << ',' << num(ax.py(table[k][s])) << ' ';
    os << "\"/>\n</g>\n";
    os << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\"" << kMargin + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\""
       << c << "\">scenario " << s + 1 << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace confab
