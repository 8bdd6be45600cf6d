#include "confab/training.hpp"

#include <cmath>

namespace confab {

RegressionData assemble_regression_data(std::span<const Drive> drives, const RCConfig& config) {
  if (drives.empty()) throw AssemblyError("assemble_regression_data: no drives");
  const Index l_star = config.listen_index();
  const Index t_star = config.train_index();
  const Index per_drive = t_star - l_star + 1;
  if (per_drive < 1) throw AssemblyError("assemble_regression_data: empty training window");

  const Index N = drives.front().reservoir->dim();
  const Index D = drives.front().signal->dim();
  RegressionData data;
  data.X.resize(2 * N, per_drive * static_cast<Index>(drives.size()));
  data.Y.resize(D, data.X.cols());

  Index col = 0;
  for (std::size_t k = 0; k < drives.size(); ++k) {
    const Drive& d = drives[k];
    const auto name = "drive " + std::to_string(k) + " (attractor " + std::to_string(d.attractor_id) + ")";
    if (!d.reservoir || !d.signal) throw AssemblyError("assemble_regression_data: " + name + " is missing data");
    if (d.reservoir->dim() != N || d.signal->dim() != D)
      throw AssemblyError("assemble_regression_data: " + name + " has mismatched dimensions");
    if (d.reservoir->size() < t_star + 1 || d.signal->size() < t_star + 1)
      throw AssemblyError("assemble_regression_data: " + name + " does not cover [0, t_train]");
    data.segments.push_back({d.attractor_id, col, per_drive, d.bias_level});
    for (Index i = l_star; i <= t_star; ++i, ++col) {
      const auto r = d.reservoir->samples.col(i);
      data.X.col(col).head(N) = r;
      data.X.col(col).tail(N) = r.cwiseAbs2();
      data.Y.col(col) = d.signal->samples.col(i);
    }
  }
  return data;
}

Readout train_readout(const RegressionData& data, double beta) {
  Readout out;
  try {
    out.W_out = solve_ridge(data.X, data.Y, beta);
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(std::string("train_readout: ") + e.what(), e.rank(), e.dim());
  }
  out.provenance = data.segments.size() > 1 ? ReadoutProvenance::parameter_aware : ReadoutProvenance::single;
  for (const auto& s : data.segments) out.segments.push_back({s.attractor_id, "", s.bias_level});
  return out;
}

double training_residual_rms(const Readout& readout, const RegressionData& data) {
  const Mat E = readout.W_out * data.X - data.Y;
  return std::sqrt(E.squaredNorm() / static_cast<double>(E.size()));
}

SingleTraining train_single(const TrainingSignal& signal, const RCConfig& config, const Network& net) {
  SingleTraining out;
  out.signal = signal;
  const Vec bias = Vec::Zero(net.M.rows());
  const Trajectory r = open_loop_drive(net, config, signal.trajectory, bias);
  const Drive drive{&r, &signal.trajectory, 0.0, 0};
  const RegressionData data = assemble_regression_data(std::span<const Drive>(&drive, 1), config);
  out.readout = train_readout(data, config.beta);
  out.readout.segments.front().source = signal.source.name();
  out.warm_start = r.samples.col(config.train_index());
  out.residual_rms = training_residual_rms(out.readout, data);
  return out;
}

SingleTraining train_single(const SourceSystem& sys, const RCConfig& config, const Network& net) {
  return train_single(generate_training_signal(sys, config), config, net);
}

ParameterAwareTraining train_parameter_aware(std::span<const BiasedSource> sources, const RCConfig& config,
                                             const Network& net) {
  if (sources.empty()) throw ConfigError("train_parameter_aware: no attractors given");
  ParameterAwareTraining out;
  std::vector<Trajectory> responses;
  responses.reserve(sources.size());
  out.signals.reserve(sources.size());
  for (const auto& src : sources) {
    out.signals.push_back(generate_training_signal(src.system, config));
    responses.push_back(
        open_loop_drive(net, config, out.signals.back().trajectory, constant_bias(net.M.rows(), src.bias_level)));
    out.warm_starts.push_back(responses.back().samples.col(config.train_index()));
  }
  std::vector<Drive> drives;
  for (std::size_t k = 0; k < sources.size(); ++k)
    drives.push_back({&responses[k], &out.signals[k].trajectory, sources[k].bias_level, static_cast<int>(k + 1)});
  const RegressionData data = assemble_regression_data(drives, config);
  out.readout = train_readout(data, config.beta);
  out.readout.provenance = ReadoutProvenance::parameter_aware;
  for (std::size_t k = 0; k < sources.size(); ++k) out.readout.segments[k].source = sources[k].system.name();
  out.residual_rms = training_residual_rms(out.readout, data);
  return out;
}

}  // namespace confab
