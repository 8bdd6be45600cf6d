#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "confab/config.hpp"
#include "confab/numerics.hpp"

namespace confab {

/// One random realisation: internal matrix M (N x N) rescaled to rho, and input
/// matrix W_in (N x D) with exactly one nonzero per row.
struct Network {
  Mat M;
  Mat W_in;
  double rho_actual = 0.0;
  /// Sub-seed that produced M (differs from network_seed only after a redraw).
  std::uint64_t m_seed = 0;
};

/// Erdos-Renyi pattern at density P with uniform (-1, 1) weights, not rescaled.
/// A draw with spectral radius 0 is redrawn with seed + 1, + 2, ...; the seed
/// actually used is written to *used_seed.
Mat sample_internal_matrix(Index N, double P, std::uint64_t seed, std::uint64_t* used_seed = nullptr);
Mat sample_input_matrix(Index N, Index D, std::uint64_t seed);

/// Rescales `raw_M` to `rho` and pairs it with `W_in`.
Network network_from_raw(const Mat& raw_M, const Mat& W_in, double rho, std::uint64_t m_seed = 0);
Network build_network(const RCConfig& config);

/// (r; r^2) with the square taken componentwise.
Vec q_stack(const Vec& r);

enum class ReadoutProvenance { single, parameter_aware };

struct ReadoutSegment {
  int attractor_id = 0;
  std::string source;       // e.g. "sprott(a=17)"
  double bias_level = 0.0;  // bias vector is bias_level * 1
};

struct Readout {
  Mat W_out;  // D x 2N
  ReadoutProvenance provenance = ReadoutProvenance::single;
  std::vector<ReadoutSegment> segments;
};

Vec readout_map(const Readout& readout, const Vec& r);
Vec constant_bias(Index N, double level);

/// Scratch for one closed-loop evaluation stream. Not shareable across threads.
struct ReservoirWorkspace {
  Vec pre;  // M r + sigma W_in u + b
  Vec r2;
  Vec u;
};

/// Sparse, sigma-folded form of a Network used inside RK4 stages.
class ReservoirKernel {
 public:
  ReservoirKernel(const Network& net, double sigma, double gamma);

  Index N() const { return n_; }
  Index D() const { return d_; }

  /// dr = gamma (-r + tanh(M r + sigma W_in u + bias)).
  void driven_rhs(const Vec& r, const Vec& u, const Vec& bias, Vec& dr, ReservoirWorkspace& ws) const;

 private:
  Index n_;
  Index d_;
  double gamma_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> m_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> w_in_;  // already multiplied by sigma
};

/// The autonomous closed-loop reservoir for a fixed readout and bias.
/// Immutable; concurrent runs share one instance and own their workspaces.
class ClosedLoop {
 public:
  ClosedLoop(const Network& net, const Readout& readout, Vec bias, double sigma, double gamma);

  Index state_dim() const { return kernel_.N(); }
  Index output_dim() const { return w1_.rows(); }

  void rhs(const Vec& r, Vec& dr, ReservoirWorkspace& ws) const;
  /// W_out q(r) into `out`.
  void project(const Vec& r, Vec& out, ReservoirWorkspace& ws) const;
  Vec project(const Vec& r) const;

  /// The vector field with a private workspace, for generic integrators.
  VectorField field() const;

 private:
  ReservoirKernel kernel_;
  Mat w1_;  // linear block of W_out
  Mat w2_;  // square block of W_out
  Vec bias_;
};

/// Open-loop response to `signal` from r(0) = 0, with u linearly interpolated
/// between samples inside each RK4 step. Returns r at samples 0 .. t_train / tau.
Trajectory open_loop_drive(const Network& net, const RCConfig& config, const Trajectory& signal, const Vec& bias);

struct ClosedLoopOptions {
  bool keep_states = true;
  /// Samples before this time (relative to the start) are not stored.
  double record_from = 0.0;
};

struct ClosedLoopResult {
  Trajectory states;     // reservoir state space (empty unless keep_states)
  Trajectory projected;  // readout projection
  Vec final_state;
};

/// Integrates the closed loop from r0 for `duration` and projects each sample.
/// A non-finite state throws DivergenceError.
ClosedLoopResult closed_loop_run(const ClosedLoop& loop, const Vec& r0, double tau, double duration,
                                 const ClosedLoopOptions& options = {});
ClosedLoopResult closed_loop_run(const Network& net, const Readout& readout, const Vec& r0, const Vec& bias,
                                 const RCConfig& config, double duration, const ClosedLoopOptions& options = {});

}  // namespace confab
