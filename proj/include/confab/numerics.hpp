#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "confab/core.hpp"

namespace confab {

/// Autonomous right-hand side x' = f(x). `rhs` writes f(x) into its second
/// argument, which is already sized to `dimension`.
struct VectorField {
  Index dimension = 0;
  std::function<void(const Vec&, Vec&)> rhs;

  Vec operator()(const Vec& x) const {
    Vec dx(dimension);
    rhs(x, dx);
    return dx;
  }
};

/// Stage buffers for in-place RK4 so hot loops do not allocate.
struct Rk4Scratch {
  Vec k1, k2, k3, k4, tmp;
  explicit Rk4Scratch(Index n = 0) { resize(n); }
  void resize(Index n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    tmp.resize(n);
  }
};

/// Classical RK4 update of x in place. `f(x, dx)` evaluates the field.
/// Returns false if the new state is not finite (x is left holding it).
template <class F>
bool rk4_advance(F&& f, Vec& x, double tau, Rk4Scratch& s) {
  if (s.k1.size() != x.size()) s.resize(x.size());
  f(x, s.k1);
  s.tmp = x + (0.5 * tau) * s.k1;
  f(s.tmp, s.k2);
  s.tmp = x + (0.5 * tau) * s.k2;
  f(s.tmp, s.k3);
  s.tmp = x + tau * s.k3;
  f(s.tmp, s.k4);
  x += (tau / 6.0) * (s.k1 + 2.0 * s.k2 + 2.0 * s.k3 + s.k4);
  return x.allFinite();
}

Vec rk4_step(const VectorField& f, const Vec& x, double tau);

/// n_steps RK4 iterates of x0; returns n_steps + 1 samples including x0.
/// Throws DivergenceError holding the samples up to the failing step.
Trajectory integrate(const VectorField& f, const Vec& x0, double tau, std::size_t n_steps);

/// Largest eigenvalue modulus, from a dense real eigensolve.
double spectral_radius(const Mat& M);

/// (rho_target / spectral_radius(M)) * M, or the zero matrix for rho_target == 0.
Mat rescale_to_radius(const Mat& M, double rho_target);

/// Minimiser W (D x K) of sum_t |W x_t - y_t|^2 + beta |W|^2 over the columns
/// of X (K x T) and Y (D x T), from the Cholesky factorisation of X X^T + beta I.
Mat solve_ridge(const Mat& X, const Mat& Y, double beta);

enum class ExtremumKind { maxima, minima };

const char* to_string(ExtremumKind kind);
ExtremumKind extremum_kind_from_string(const std::string& s);

struct ExtremaSeries {
  ExtremumKind kind = ExtremumKind::maxima;
  Index coordinate_index = 0;
  std::vector<std::size_t> times;       // sample index of the bracketed extremum
  std::vector<double> offsets;          // refined position in (-0.5, 0.5) samples
  std::vector<double> values;           // parabola vertex value
  std::vector<double> companion_values; // second coordinate at the refined time

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

/// Strict three-point local extrema with parabolic refinement of the value.
ExtremaSeries local_extrema(std::span<const double> series, ExtremumKind kind);

/// As above on coordinate `coord` of a trajectory; companion values are taken
/// from `companion` (or left empty when companion < 0).
ExtremaSeries local_extrema(const Trajectory& traj, Index coord, ExtremumKind kind, Index companion = -1);

}  // namespace confab
