#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "confab/rng.hpp"
#include "confab/training.hpp"

using namespace confab;

namespace {

RCConfig short_config() {
  RCConfig c = RCConfig::task2();
  c.N = 30;
  c.P = 0.1;
  c.t_listen = 2.0;
  c.t_train = 6.0;
  c.t_trans = 7.0;
  c.t_predict = 8.0;
  return c;
}

Trajectory random_traj(Index dim, Index n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  Trajectory t;
  t.tau = 0.1;
  t.samples.resize(dim, n);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < n; ++j) t.samples(i, j) = uniform_pm1(g);
  return t;
}

double objective(const Mat& W, const RegressionData& d, double beta) {
  return (W * d.X - d.Y).squaredNorm() + beta * W.squaredNorm();
}

}  // namespace

TEST_CASE("assembly keeps samples l* through t*") {
  RCConfig c;
  c.tau = 0.1;
  c.t_listen = 0.1;
  c.t_train = 0.2;
  const Trajectory r = random_traj(4, 3, 1), u = random_traj(3, 3, 2);
  const Drive d{&r, &u, 0.0, 1};
  const RegressionData data = assemble_regression_data(std::span<const Drive>(&d, 1), c);
  CHECK(data.X.cols() == 2);
  CHECK(data.X.rows() == 8);
  CHECK(data.X.col(0) == q_stack(r.samples.col(1)));
  CHECK(data.Y.col(1) == u.samples.col(2));
}

TEST_CASE("assembly concatenates drives and records segments") {
  RCConfig c;
  c.tau = 0.1;
  c.t_listen = 1.0;
  c.t_train = 5.0;
  const Trajectory r1 = random_traj(6, 51, 3), r2 = random_traj(6, 51, 4), u1 = random_traj(3, 51, 5),
                   u2 = random_traj(3, 51, 6);
  const std::vector<Drive> drives{{&r1, &u1, 0.4, 1}, {&r2, &u2, -0.4, 2}};
  const RegressionData data = assemble_regression_data(drives, c);
  REQUIRE(data.segments.size() == 2);
  CHECK(data.X.cols() == 82);
  CHECK(data.segments[1].first_col == 41);
  CHECK(data.segments[1].bias_level == -0.4);
  std::mt19937_64 g(7);
  for (int k = 0; k < 10; ++k) {
    const auto j = static_cast<Index>(uniform_index(g, 82));
    const Trajectory& r = j < 41 ? r1 : r2;
    CHECK(data.X.col(j) == q_stack(r.samples.col(10 + (j % 41))));
  }
}

TEST_CASE("short drives are rejected by name") {
  RCConfig c;
  c.tau = 0.1;
  c.t_listen = 1.0;
  c.t_train = 5.0;
  const Trajectory r1 = random_traj(6, 51, 3), r2 = random_traj(6, 30, 4), u = random_traj(3, 51, 5);
  const std::vector<Drive> drives{{&r1, &u, 0.0, 1}, {&r2, &u, 0.0, 2}};
  try {
    assemble_regression_data(drives, c);
    FAIL("expected AssemblyError");
  } catch (const AssemblyError& e) {
    CHECK(std::string(e.what()).find("drive 1") != std::string::npos);
  }
}

TEST_CASE("readout matches a normal-equations oracle and is a strict minimiser") {
  RCConfig c;
  c.tau = 0.1;
  c.t_listen = 0.0;
  c.t_train = 2.9;
  const Trajectory r = random_traj(4, 30, 8), u = random_traj(2, 30, 9);
  const Drive d{&r, &u, 0.0, 1};
  const RegressionData data = assemble_regression_data(std::span<const Drive>(&d, 1), c);
  const double beta = 0.01;
  const Readout ro = train_readout(data, beta);

  // Dense normal equations via LU of the full Gram matrix.
  const Mat G = data.X * data.X.transpose() + beta * Mat::Identity(8, 8);
  const Mat oracle = (data.Y * data.X.transpose()) * G.fullPivLu().inverse();
  CHECK((ro.W_out - oracle).cwiseAbs().maxCoeff() < 1e-8);

  const double f0 = objective(ro.W_out, data, beta);
  std::mt19937_64 g(10);
  for (int k = 0; k < 20; ++k) {
    Mat dir(2, 8);
    for (Index i = 0; i < dir.size(); ++i) dir(i) = uniform_pm1(g);
    dir *= 1e-4 / dir.norm();
    CHECK(objective(ro.W_out + dir, data, beta) > f0);
  }
  // Prefactor neutrality: scaling both terms moves nothing.
  const Mat scaled = solve_ridge(data.X / std::sqrt(30.0), data.Y / std::sqrt(30.0), beta / 30.0);
  CHECK((scaled - ro.W_out).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("column order does not change the readout") {
  RCConfig c;
  c.tau = 0.1;
  c.t_listen = 0.0;
  c.t_train = 4.9;
  const Trajectory r = random_traj(5, 50, 11), u = random_traj(3, 50, 12);
  const Drive d{&r, &u, 0.0, 1};
  RegressionData data = assemble_regression_data(std::span<const Drive>(&d, 1), c);
  const Readout a = train_readout(data, 1e-3);
  std::vector<Index> perm(static_cast<std::size_t>(data.X.cols()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(13));
  RegressionData shuffled = data;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    shuffled.X.col(static_cast<Index>(j)) = data.X.col(perm[j]);
    shuffled.Y.col(static_cast<Index>(j)) = data.Y.col(perm[j]);
  }
  CHECK((train_readout(shuffled, 1e-3).W_out - a.W_out).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("parameter-aware training on duplicated data equals single training") {
  const RCConfig c = short_config();
  const Network net = build_network(c);
  const SourceSystem sys = SourceSystem::sprott(27.0);
  const SingleTraining single = train_single(sys, c, net);
  const std::vector<BiasedSource> twice{{sys, 0.0}, {sys, 0.0}};
  RCConfig c2 = c;
  c2.beta = 2.0 * c.beta;  // the Gram matrix doubles with duplicated columns
  const ParameterAwareTraining pa = train_parameter_aware(twice, c2, net);
  CHECK((pa.readout.W_out - single.readout.W_out).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(pa.readout.provenance == ReadoutProvenance::parameter_aware);
  CHECK(pa.warm_starts[0] == single.warm_start);
}

TEST_CASE("attractor order does not change the parameter-aware readout") {
  const RCConfig c = short_config();
  const Network net = build_network(c);
  const std::vector<BiasedSource> ab{{SourceSystem::sprott(17.0), 0.3}, {SourceSystem::sprott(27.0), -0.3}};
  const std::vector<BiasedSource> ba{ab[1], ab[0]};
  const auto x = train_parameter_aware(ab, c, net);
  const auto y = train_parameter_aware(ba, c, net);
  CHECK((x.readout.W_out - y.readout.W_out).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(x.warm_starts[0] == y.warm_starts[1]);
  CHECK(x.readout.segments[0].source == "sprott(a=17)");
}

TEST_CASE("five-attractor training stacks five segments") {
  const RCConfig c = short_config();
  const Network net = build_network(c);
  std::vector<BiasedSource> src;
  for (double b : {-0.2, -0.1, 0.0, 0.1, 0.2}) src.push_back({SourceSystem::sprott(22.0 - 25.0 * b), b});
  const auto pa = train_parameter_aware(src, c, net);
  CHECK(pa.readout.segments.size() == 5);
  CHECK(pa.warm_starts.size() == 5);
  CHECK(pa.readout.W_out.rows() == 3);
  CHECK(pa.readout.W_out.cols() == 2 * c.N);
}

TEST_CASE("lorenz training residual is small at the task defaults") {
  RCConfig c = RCConfig::task1();
  int passing = 0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    c.seeds.network_seed = s;
    const Network net = build_network(c);
    if (train_single(SourceSystem::lorenz(), c, net).residual_rms < 1.0) ++passing;
  }
  CHECK(passing >= 2);
}

TEST_CASE("closed loop from r(t_train) follows the held-out lorenz signal") {
  RCConfig c = RCConfig::task1();
  const TrainingSignal sig = generate_training_signal(SourceSystem::lorenz(), c);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    c.seeds.network_seed = s;
    const Network net = build_network(c);
    const SingleTraining tr = train_single(sig, c, net);
    const auto res = closed_loop_run(net, tr.readout, tr.warm_start, constant_bias(c.N, 0.0), c, 1.0);
    for (Index k = 0; k < res.projected.size(); k += 10)
      CHECK((res.projected.sample(k) - sig.trajectory.sample(c.train_index() + k)).norm() < 1.0);
  }
}

TEST_CASE("empty source list is a configuration error") {
  const RCConfig c = short_config();
  const Network net = build_network(c);
  CHECK_THROWS_AS(train_parameter_aware({}, c, net), ConfigError);
}
