#include <doctest.h>

#include <cmath>
#include <sstream>

#include "confab/classification.hpp"
#include "confab/systems.hpp"

using namespace confab;

TEST_CASE("lorenz vanishes at its nontrivial equilibria") {
  const double c = std::sqrt(8.0 / 3.0 * 27.0);
  CHECK(lorenz_rhs({c, c, 27.0}).norm() < 1e-12);
  CHECK(lorenz_rhs({-c, -c, 27.0}).norm() < 1e-12);
  CHECK(lorenz_rhs({0, 0, 0}).norm() == 0.0);
}

TEST_CASE("sprott field is equivariant under (x1, x2, x3) -> (-x1, -x2, x3)") {
  for (double a : {17.0, 22.0, 27.0}) {
    const Vec3 x{0.3, -0.7, 1.1};
    const Vec3 fx = sprott_rhs(x, a);
    const Vec3 fm = sprott_rhs({-x[0], -x[1], x[2]}, a);
    CHECK(fm[0] == doctest::Approx(-fx[0]));
    CHECK(fm[1] == doctest::Approx(-fx[1]));
    CHECK(fm[2] == doctest::Approx(fx[2]));
  }
}

TEST_CASE("halvorsen is cyclic in its coordinates") {
  const Vec3 x{0.4, -1.2, 2.5};
  const Vec3 fx = halvorsen_rhs(x);
  const Vec3 fr = halvorsen_rhs({x[1], x[2], x[0]});
  CHECK(fr[0] == doctest::Approx(fx[1]));
  CHECK(fr[1] == doctest::Approx(fx[2]));
  CHECK(fr[2] == doctest::Approx(fx[0]));
}

TEST_CASE("training signal covers [0, t_predict] at spacing tau") {
  RCConfig cfg = RCConfig::task1();
  cfg.t_listen = 1.0;
  cfg.t_train = 2.0;
  cfg.t_trans = 2.5;
  cfg.t_predict = 3.0;
  const TrainingSignal s = generate_training_signal(SourceSystem::lorenz(), cfg);
  CHECK(s.trajectory.size() == 301);
  CHECK(s.trajectory.dim() == 3);
  CHECK(s.trajectory.tau == cfg.tau);
  const TrainingSignal again = generate_training_signal(SourceSystem::lorenz(), cfg);
  CHECK(s.trajectory.samples == again.trajectory.samples);
}

TEST_CASE("shifted halvorsen is the native signal plus the shift") {
  RCConfig cfg = RCConfig::task3();
  cfg.t_listen = 1.0;
  cfg.t_train = 2.0;
  cfg.t_trans = 2.5;
  cfg.t_predict = 3.0;
  const Vec3 shift{1.0, -2.0, 3.0};
  const TrainingSignal a = generate_training_signal(SourceSystem::halvorsen(), cfg);
  const TrainingSignal b = generate_training_signal(SourceSystem::halvorsen(shift), cfg);
  const Mat diff = b.trajectory.samples - a.trajectory.samples;
  for (Index k = 0; k < 3; ++k) CHECK(diff.row(k).cwiseAbs().maxCoeff() == doctest::Approx(std::abs(shift[k])));
}

TEST_CASE("sprott endpoints are period 1 and period 4 in x2 minima") {
  const auto period_at = [](double a) {
    const SourceSystem s = SourceSystem::sprott(a);
    const Trajectory tr = settle_and_record(s, s.default_initial_state(), 0.01, 300.0, 200.0);
    return count_period(tr, 1, ExtremumKind::minima);
  };
  const PeriodCount p1 = period_at(27.0);
  const PeriodCount p4 = period_at(17.0);
  CHECK(p1.periodic);
  CHECK(p1.period == 1);
  CHECK(p4.periodic);
  CHECK(p4.period == 4);
}

TEST_CASE("trajectory csv round-trips bit-exactly") {
  Trajectory tr;
  tr.tau = 0.01;
  tr.samples = Mat::Random(3, 17);
  std::stringstream ss;
  write_trajectory_csv(ss, tr);
  const Trajectory back = read_trajectory_csv(ss);
  CHECK(back.samples == tr.samples);
  CHECK(back.tau == doctest::Approx(tr.tau).epsilon(1e-12));
}

TEST_CASE("unknown system names are configuration errors") {
  CHECK_THROWS_AS(system_kind_from_string("rossler"), ConfigError);
}
