#pragma once

#include <cstdint>

#include <json.hpp>

#include "confab/core.hpp"

namespace confab {

struct Seeds {
  std::uint64_t network_seed = 1;
  std::uint64_t input_seed = 2;
  std::uint64_t ic_seed = 3;
};

/// Scalar hyperparameters of one reservoir computer and its training run.
/// Times are in model units; t_trans is absolute (default t_train + 70).
struct RCConfig {
  Index N = 100;
  Index D = 3;
  double rho = 0.5;
  double sigma = 0.2;
  double gamma = 10.0;
  double beta = 1e-3;
  double tau = 0.01;
  double P = 0.05;
  double t_listen = 100.0;
  double t_train = 200.0;
  double t_predict = 300.0;
  double t_trans = 270.0;
  double b = 0.0;
  Seeds seeds;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  Index listen_index() const;   // l* = t_listen / tau
  Index train_index() const;    // t* = t_train / tau
  Index predict_index() const;  // t_predict / tau
  /// Closed-loop settling time before classification, t_trans - t_train.
  double settle_time() const { return t_trans - t_train; }
  /// Closed-loop run length used for classification, t_predict - t_train.
  double closed_loop_time() const { return t_predict - t_train; }

  /// Task defaults.
  static RCConfig task1();
  static RCConfig task2();
  static RCConfig task3();
};

/// Number of tau-steps covering duration t (rounded to the nearest integer).
Index steps_for(double t, double tau);

void to_json(nlohmann::json& j, const RCConfig& c);
/// Reads keys present in j over the current values of c.
void update_from_json(const nlohmann::json& j, RCConfig& c);

}  // namespace confab
