#include "confab/reservoir.hpp"

#include <algorithm>
#include <memory>
#include <random>

#include <spdlog/spdlog.h>

#include "confab/rng.hpp"

namespace confab {

namespace {

Mat draw_internal(Index N, double P, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Mat M = Mat::Zero(N, N);
  // Row-major draw order so the pattern does not depend on Eigen's storage.
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) {
      const bool present = uniform01(gen) < P;
      const double w = uniform_pm1(gen);
      if (present) M(i, j) = w;
    }
  }
  return M;
}

}  // namespace

Mat sample_internal_matrix(Index N, double P, std::uint64_t seed, std::uint64_t* used_seed) {
  std::uint64_t s = seed;
  for (int attempt = 0;; ++attempt, ++s) {
    Mat M = draw_internal(N, P, s);
    if (M.cwiseAbs().maxCoeff() > 0.0 && spectral_radius(M) > 0.0) {
      if (used_seed) *used_seed = s;
      return M;
    }
    spdlog::warn("internal matrix draw with seed {} has spectral radius 0; redrawing with seed {}", s, s + 1);
    if (attempt > 1000) throw Error("sample_internal_matrix: no draw with nonzero spectral radius");
  }
}

Mat sample_input_matrix(Index N, Index D, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Mat W = Mat::Zero(N, D);
  for (Index i = 0; i < N; ++i) {
    const auto col = static_cast<Index>(uniform_index(gen, static_cast<std::uint64_t>(D)));
    W(i, col) = uniform_pm1(gen);
  }
  return W;
}

Network network_from_raw(const Mat& raw_M, const Mat& W_in, double rho, std::uint64_t m_seed) {
  Network net;
  net.M = rescale_to_radius(raw_M, rho);
  net.W_in = W_in;
  net.rho_actual = rho == 0.0 ? 0.0 : spectral_radius(net.M);
  net.m_seed = m_seed;
  return net;
}

Network build_network(const RCConfig& config) {
  config.validate();
  std::uint64_t used = config.seeds.network_seed;
  Mat raw = sample_internal_matrix(config.N, config.P, config.seeds.network_seed, &used);
  return network_from_raw(raw, sample_input_matrix(config.N, config.D, config.seeds.input_seed), config.rho, used);
}

Vec q_stack(const Vec& r) {
  Vec q(2 * r.size());
  q.head(r.size()) = r;
  q.tail(r.size()) = r.cwiseAbs2();
  return q;
}

Vec readout_map(const Readout& readout, const Vec& r) {
  if (readout.W_out.cols() != 2 * r.size()) throw Error("readout_map: W_out must have 2N columns");
  return readout.W_out * q_stack(r);
}

Vec constant_bias(Index N, double level) { return Vec::Constant(N, level); }

ReservoirKernel::ReservoirKernel(const Network& net, double sigma, double gamma)
    : n_(net.M.rows()), d_(net.W_in.cols()), gamma_(gamma) {
  if (net.M.cols() != n_ || net.W_in.rows() != n_) throw Error("ReservoirKernel: inconsistent network shapes");
  m_ = net.M.sparseView();
  w_in_ = (sigma * net.W_in).sparseView();
}

void ReservoirKernel::driven_rhs(const Vec& r, const Vec& u, const Vec& bias, Vec& dr,
                                 ReservoirWorkspace& ws) const {
  ws.pre.noalias() = m_ * r;
  ws.pre.noalias() += w_in_ * u;
  ws.pre += bias;
  dr = gamma_ * (ws.pre.array().tanh() - r.array()).matrix();
}

ClosedLoop::ClosedLoop(const Network& net, const Readout& readout, Vec bias, double sigma, double gamma)
    : kernel_(net, sigma, gamma), bias_(std::move(bias)) {
  const Index N = kernel_.N();
  if (readout.W_out.cols() != 2 * N) throw Error("ClosedLoop: W_out must have 2N columns");
  if (readout.W_out.rows() != kernel_.D()) throw Error("ClosedLoop: W_out rows must equal the input dimension");
  if (bias_.size() != N) throw Error("ClosedLoop: bias must have N entries");
  w1_ = readout.W_out.leftCols(N);
  w2_ = readout.W_out.rightCols(N);
}

void ClosedLoop::project(const Vec& r, Vec& out, ReservoirWorkspace& ws) const {
  ws.r2 = r.cwiseAbs2();
  out.noalias() = w1_ * r;
  out.noalias() += w2_ * ws.r2;
}

Vec ClosedLoop::project(const Vec& r) const {
  ReservoirWorkspace ws;
  Vec out(output_dim());
  project(r, out, ws);
  return out;
}

void ClosedLoop::rhs(const Vec& r, Vec& dr, ReservoirWorkspace& ws) const {
  project(r, ws.u, ws);
  kernel_.driven_rhs(r, ws.u, bias_, dr, ws);
}

VectorField ClosedLoop::field() const {
  auto ws = std::make_shared<ReservoirWorkspace>();
  VectorField f;
  f.dimension = state_dim();
  f.rhs = [this, ws](const Vec& r, Vec& dr) { rhs(r, dr, *ws); };
  return f;
}

Trajectory open_loop_drive(const Network& net, const RCConfig& config, const Trajectory& signal, const Vec& bias) {
  const Index n_steps = config.train_index();
  if (signal.size() < n_steps + 1) throw Error("open_loop_drive: signal does not cover [0, t_train]");
  if (signal.dim() != net.W_in.cols()) throw Error("open_loop_drive: signal dimension differs from D");
  const ReservoirKernel kernel(net, config.sigma, config.gamma);
  ReservoirWorkspace ws;
  Rk4Scratch scratch(kernel.N());

  Trajectory out;
  out.tau = config.tau;
  out.samples.resize(kernel.N(), n_steps + 1);
  Vec r = Vec::Zero(kernel.N());
  out.samples.col(0) = r;
  // rk4_advance evaluates its stages at t, t + tau/2, t + tau/2, t + tau; u is
  // interpolated linearly between the two bracketing samples.
  Vec u_left(kernel.D()), u_mid(kernel.D()), u_right(kernel.D());
  int stage = 0;
  auto f = [&](const Vec& x, Vec& dx) {
    const Vec& u = stage == 0 ? u_left : (stage == 3 ? u_right : u_mid);
    ++stage;
    kernel.driven_rhs(x, u, bias, dx, ws);
  };
  for (Index i = 0; i < n_steps; ++i) {
    u_left = signal.samples.col(i);
    u_right = signal.samples.col(i + 1);
    u_mid = 0.5 * (u_left + u_right);
    stage = 0;
    if (!rk4_advance(f, r, config.tau, scratch))
      throw DivergenceError("open_loop_drive: non-finite reservoir state (kernel bug)", static_cast<std::size_t>(i + 1));
    out.samples.col(i + 1) = r;
  }
  return out;
}

ClosedLoopResult closed_loop_run(const ClosedLoop& loop, const Vec& r0, double tau, double duration,
                                 const ClosedLoopOptions& options) {
  if (!(duration > 0.0)) throw Error("closed_loop_run: duration must be positive");
  if (!r0.allFinite()) throw Error("closed_loop_run: non-finite initial state");
  const Index n_steps = steps_for(duration, tau);
  const Index first = std::clamp<Index>(steps_for(options.record_from, tau), 0, n_steps);
  const Index n_keep = n_steps - first + 1;

  ClosedLoopResult res;
  res.projected.tau = tau;
  res.projected.t0 = static_cast<double>(first) * tau;
  res.projected.samples.resize(loop.output_dim(), n_keep);
  if (options.keep_states) {
    res.states.tau = tau;
    res.states.t0 = res.projected.t0;
    res.states.samples.resize(loop.state_dim(), n_keep);
  }

  ReservoirWorkspace ws;
  Rk4Scratch scratch(loop.state_dim());
  Vec out(loop.output_dim());
  Vec r = r0;
  auto f = [&](const Vec& x, Vec& dx) { loop.rhs(x, dx, ws); };
  auto store = [&](Index i) {
    if (i < first) return;
    loop.project(r, out, ws);
    res.projected.samples.col(i - first) = out;
    if (options.keep_states) res.states.samples.col(i - first) = r;
  };
  store(0);
  for (Index i = 1; i <= n_steps; ++i) {
    if (!rk4_advance(f, r, tau, scratch))
      throw DivergenceError("closed_loop_run: non-finite reservoir state (kernel bug)", static_cast<std::size_t>(i));
    store(i);
  }
  res.final_state = r;
  return res;
}

ClosedLoopResult closed_loop_run(const Network& net, const Readout& readout, const Vec& r0, const Vec& bias,
                                 const RCConfig& config, double duration, const ClosedLoopOptions& options) {
  const ClosedLoop loop(net, readout, bias, config.sigma, config.gamma);
  return closed_loop_run(loop, r0, config.tau, duration, options);
}

}  // namespace confab
