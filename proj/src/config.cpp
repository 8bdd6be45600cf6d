#include "confab/config.hpp"

#include <cmath>

namespace confab {

Index steps_for(double t, double tau) { return static_cast<Index>(std::llround(t / tau)); }

void RCConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("invalid RC configuration: " + m); };
  if (N < 1) fail("N must be >= 1");
  if (D < 1) fail("D must be >= 1");
  if (!(P > 0.0 && P <= 1.0)) fail("P must lie in (0, 1]");
  if (!(gamma > 0.0)) fail("gamma must be positive");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (rho < 0.0) fail("rho must be non-negative");
  if (beta < 0.0) fail("beta must be non-negative");
  if (!(t_listen > 0.0 && t_listen < t_train && t_train < t_predict))
    fail("times must satisfy 0 < t_listen < t_train < t_predict");
  if (!(t_trans >= t_train && t_trans < t_predict)) fail("t_trans must lie in [t_train, t_predict)");
}

Index RCConfig::listen_index() const { return steps_for(t_listen, tau); }
Index RCConfig::train_index() const { return steps_for(t_train, tau); }
Index RCConfig::predict_index() const { return steps_for(t_predict, tau); }

RCConfig RCConfig::task1() { return RCConfig{}; }

RCConfig RCConfig::task2() {
  RCConfig c;
  c.rho = 1.2;
  c.sigma = 1.6;
  c.beta = 0.01;
  c.t_listen = 100.0;
  c.t_train = 300.0;
  c.t_predict = 500.0;
  c.t_trans = 370.0;
  c.b = 0.4;
  return c;
}

RCConfig RCConfig::task3() {
  RCConfig c;
  c.rho = 1.2;
  c.sigma = 0.2;
  c.beta = 0.1;
  c.t_listen = 100.0;
  c.t_train = 300.0;
  c.t_predict = 500.0;
  c.t_trans = 370.0;
  c.b = 0.3;
  return c;
}

void to_json(nlohmann::json& j, const RCConfig& c) {
  j = nlohmann::json{{"N", c.N},
                     {"D", c.D},
                     {"rho", c.rho},
                     {"sigma", c.sigma},
                     {"gamma", c.gamma},
                     {"beta", c.beta},
                     {"tau", c.tau},
                     {"P", c.P},
                     {"t_listen", c.t_listen},
                     {"t_train", c.t_train},
                     {"t_predict", c.t_predict},
                     {"t_trans", c.t_trans},
                     {"b", c.b},
                     {"seeds",
                      {{"network_seed", c.seeds.network_seed},
                       {"input_seed", c.seeds.input_seed},
                       {"ic_seed", c.seeds.ic_seed}}}};
}

void update_from_json(const nlohmann::json& j, RCConfig& c) {
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("N", c.N);
    get("D", c.D);
    get("rho", c.rho);
    get("sigma", c.sigma);
    get("gamma", c.gamma);
    get("beta", c.beta);
    get("tau", c.tau);
    get("P", c.P);
    get("t_listen", c.t_listen);
    get("t_train", c.t_train);
    get("t_predict", c.t_predict);
    get("t_trans", c.t_trans);
    get("b", c.b);
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      if (s.contains("network_seed")) c.seeds.network_seed = s.at("network_seed").get<std::uint64_t>();
      if (s.contains("input_seed")) c.seeds.input_seed = s.at("input_seed").get<std::uint64_t>();
      if (s.contains("ic_seed")) c.seeds.ic_seed = s.at("ic_seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad RC configuration value: ") + e.what());
  }
}

}  // namespace confab
