#pragma once

#include <span>
#include <vector>

#include "confab/reservoir.hpp"
#include "confab/systems.hpp"

namespace confab {

/// Columns [first_col, first_col + cols) of the regression data came from one
/// drive with bias bias_level * 1.
struct DataSegment {
  int attractor_id = 0;
  Index first_col = 0;
  Index cols = 0;
  double bias_level = 0.0;
};

struct RegressionData {
  Mat X;  // 2N x T, columns q(r[i])
  Mat Y;  // D x T, columns u[i]
  std::vector<DataSegment> segments;
};

/// One open-loop response paired with the signal that drove it.
struct Drive {
  const Trajectory* reservoir = nullptr;  // r[0 .. t*]
  const Trajectory* signal = nullptr;     // u[0 .. >= t*]
  double bias_level = 0.0;
  int attractor_id = 0;
};

/// Stacks q(r[i]) and u[i] for i = l* .. t* of every drive, in the given order.
RegressionData assemble_regression_data(std::span<const Drive> drives, const RCConfig& config);

/// Ridge readout over all segments; provenance is filled from the segments.
Readout train_readout(const RegressionData& data, double beta);

/// RMS over all entries of W_out X - Y.
double training_residual_rms(const Readout& readout, const RegressionData& data);

struct SingleTraining {
  Readout readout;
  Vec warm_start;  // r(t_train)
  TrainingSignal signal;
  double residual_rms = 0.0;
};

/// Signal generation, zero-bias drive, assembly and ridge solve.
SingleTraining train_single(const SourceSystem& sys, const RCConfig& config, const Network& net);
/// Same pipeline on a pre-generated signal (ensembles share one signal).
SingleTraining train_single(const TrainingSignal& signal, const RCConfig& config, const Network& net);

struct BiasedSource {
  SourceSystem system;
  double bias_level = 0.0;
};

struct ParameterAwareTraining {
  Readout readout;
  std::vector<Vec> warm_starts;  // r_(A_k)(t_train), in input order
  std::vector<TrainingSignal> signals;
  double residual_rms = 0.0;
};

/// One shared readout over the drives of every (system, bias) pair.
ParameterAwareTraining train_parameter_aware(std::span<const BiasedSource> sources, const RCConfig& config,
                                             const Network& net);

}  // namespace confab
