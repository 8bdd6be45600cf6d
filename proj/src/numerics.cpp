#include "confab/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

namespace confab {

Trajectory Trajectory::tail_from(double t_rel) const {
  Index first = 0;
  if (tau > 0.0) first = static_cast<Index>(std::ceil(t_rel / tau - 1e-9));
  first = std::clamp<Index>(first, 0, size());
  return slice(first, size() - first);
}

Trajectory Trajectory::slice(Index first, Index count) const {
  Trajectory out;
  out.tau = tau;
  out.t0 = time(first);
  out.samples = samples.middleCols(first, count);
  return out;
}

std::vector<double> Trajectory::coordinate(Index k) const {
  std::vector<double> out(static_cast<std::size_t>(size()));
  for (Index i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = samples(k, i);
  return out;
}

Vec rk4_step(const VectorField& f, const Vec& x, double tau) {
  if (x.size() != f.dimension) throw Error("rk4_step: state dimension does not match the field");
  Vec y = x;
  Rk4Scratch s(x.size());
  if (!rk4_advance(f.rhs, y, tau, s)) throw DivergenceError("rk4_step: non-finite state", 0);
  return y;
}

Trajectory integrate(const VectorField& f, const Vec& x0, double tau, std::size_t n_steps) {
  if (n_steps < 1) throw Error("integrate: n_steps must be >= 1");
  if (!(tau > 0.0)) throw Error("integrate: tau must be positive");
  Trajectory traj;
  traj.tau = tau;
  traj.samples.resize(x0.size(), static_cast<Index>(n_steps) + 1);
  traj.samples.col(0) = x0;
  Vec x = x0;
  Rk4Scratch s(x.size());
  for (std::size_t i = 1; i <= n_steps; ++i) {
    if (!rk4_advance(f.rhs, x, tau, s)) {
      Trajectory partial = traj.slice(0, static_cast<Index>(i));
      throw DivergenceError("integrate: non-finite state", i, std::move(partial));
    }
    traj.samples.col(static_cast<Index>(i)) = x;
  }
  return traj;
}

double spectral_radius(const Mat& M) {
  if (M.rows() != M.cols()) throw Error("spectral_radius: matrix is not square");
  if (M.size() == 0) return 0.0;
  if (!M.allFinite()) throw Error("spectral_radius: non-finite entries");
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    const Index iters = es.getMaxIterations();
    throw EigenSolveError("spectral_radius: eigenvalue iteration did not converge after " + std::to_string(iters) +
                              " iterations",
                          iters);
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat rescale_to_radius(const Mat& M, double rho_target) {
  if (rho_target < 0.0) throw InvalidRescaleError("rescale_to_radius: negative target radius");
  if (rho_target == 0.0) return Mat::Zero(M.rows(), M.cols());
  const double radius = spectral_radius(M);
  if (radius == 0.0) throw InvalidRescaleError("rescale_to_radius: input has spectral radius 0");
  return (rho_target / radius) * M;
}

Mat solve_ridge(const Mat& X, const Mat& Y, double beta) {
  if (X.cols() != Y.cols()) throw Error("solve_ridge: X and Y column counts differ");
  if (X.cols() < 1) throw Error("solve_ridge: no data columns");
  if (beta < 0.0) throw Error("solve_ridge: beta must be non-negative");
  const Index K = X.rows();
  Mat G = Mat::Zero(K, K);
  G.selfadjointView<Eigen::Lower>().rankUpdate(X);
  G.diagonal().array() += beta;
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  const Mat rhs = X * Y.transpose();

  Eigen::LLT<Mat> llt(G);
  const double eps = std::numeric_limits<double>::epsilon();
  if (llt.info() != Eigen::Success || llt.rcond() < 10.0 * eps * static_cast<double>(K)) {
    Eigen::FullPivLU<Mat> lu(G);
    const Index rank = lu.rank();
    throw SingularSystemError("solve_ridge: X X^T + beta I is singular (rank " + std::to_string(rank) + " of " +
                                  std::to_string(K) + "); use beta > 0",
                              rank, K);
  }
  return llt.solve(rhs).transpose();
}

const char* to_string(ExtremumKind kind) { return kind == ExtremumKind::maxima ? "maxima" : "minima"; }

ExtremumKind extremum_kind_from_string(const std::string& s) {
  if (s == "maxima" || s == "max") return ExtremumKind::maxima;
  if (s == "minima" || s == "min") return ExtremumKind::minima;
  throw ConfigError("unknown extremum kind '" + s + "'");
}

namespace {

// Vertex offset of the parabola through (-1, y0), (0, y1), (1, y2).
double vertex_offset(double y0, double y1, double y2) {
  const double den = y0 - 2.0 * y1 + y2;
  return den != 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
}

double quadratic_at(double y0, double y1, double y2, double d) {
  return y1 + 0.5 * d * (y2 - y0) + 0.5 * d * d * (y0 - 2.0 * y1 + y2);
}

template <class At>
ExtremaSeries scan_extrema(std::size_t n, At&& at, ExtremumKind kind) {
  ExtremaSeries out;
  out.kind = kind;
  if (n < 3) return out;
  const bool want_max = kind == ExtremumKind::maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double y0 = at(i - 1), y1 = at(i), y2 = at(i + 1);
    const bool hit = want_max ? (y1 > y0 && y1 > y2) : (y1 < y0 && y1 < y2);
    if (!hit) continue;
    const double d = vertex_offset(y0, y1, y2);
    out.times.push_back(i);
    out.offsets.push_back(d);
    out.values.push_back(quadratic_at(y0, y1, y2, d));
  }
  return out;
}

}  // namespace

ExtremaSeries local_extrema(std::span<const double> series, ExtremumKind kind) {
  return scan_extrema(series.size(), [&](std::size_t i) { return series[i]; }, kind);
}

ExtremaSeries local_extrema(const Trajectory& traj, Index coord, ExtremumKind kind, Index companion) {
  const auto n = static_cast<std::size_t>(traj.size());
  ExtremaSeries out = scan_extrema(
      n, [&](std::size_t i) { return traj.samples(coord, static_cast<Index>(i)); }, kind);
  out.coordinate_index = coord;
  if (companion >= 0) {
    out.companion_values.reserve(out.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      const auto i = static_cast<Index>(out.times[j]);
      out.companion_values.push_back(quadratic_at(traj.samples(companion, i - 1), traj.samples(companion, i),
                                                  traj.samples(companion, i + 1), out.offsets[j]));
    }
  }
  return out;
}

}  // namespace confab
