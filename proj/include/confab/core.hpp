#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace confab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Uniformly sampled multivariate time series. Column i of `samples` is the
/// state at time t0 + i * tau.
struct Trajectory {
  double tau = 0.0;
  double t0 = 0.0;
  Mat samples;

  Index dim() const { return samples.rows(); }
  Index size() const { return samples.cols(); }
  bool empty() const { return samples.cols() == 0; }
  double time(Index i) const { return t0 + static_cast<double>(i) * tau; }
  double duration() const { return size() > 0 ? static_cast<double>(size() - 1) * tau : 0.0; }
  auto sample(Index i) const { return samples.col(i); }

  /// Samples with time >= t (relative to t0), as a new trajectory.
  Trajectory tail_from(double t_rel) const;
  /// Samples [first, first + count).
  Trajectory slice(Index first, Index count) const;
  /// Copy of one coordinate as a contiguous series.
  std::vector<double> coordinate(Index k) const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state during integration. Carries the failing step index and the
/// samples computed before it.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step, Trajectory partial = {})
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step), partial_(std::move(partial)) {}
  std::size_t step() const { return step_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::size_t step_;
  Trajectory partial_;
};

class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, Index rank, Index dim)
      : Error(what), rank_(rank), dim_(dim) {}
  Index rank() const { return rank_; }
  Index dim() const { return dim_; }

 private:
  Index rank_;
  Index dim_;
};

class EigenSolveError : public Error {
 public:
  EigenSolveError(const std::string& what, Index iterations) : Error(what), iterations_(iterations) {}
  Index iterations() const { return iterations_; }

 private:
  Index iterations_;
};

class InvalidRescaleError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

}  // namespace confab
