#include <omp.h>

#include "confab/continuation.hpp"

namespace confab {

// Each iteration writes only its own slot, so results are ordered and
// identical to the serial versions for any thread count.

std::vector<ClassifiedOutput> basin_outputs_parallel(const Flow& flow, const std::vector<Vec>& states,
                                                     const BasinRun& run, const OutputClassifier& classify,
                                                     int threads) {
  std::vector<ClassifiedOutput> out(states.size());
  const auto n = static_cast<long>(states.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      const auto k = static_cast<std::size_t>(i);
      FlowRun r = flow.run(states[k], run.tau, run.settle, run.measure);
      out[k] = classify(std::move(r.window));
      out[k].final_state = std::move(r.final_state);
    } catch (...) {
#pragma omp critical(confab_basin_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

EnsembleResult scenario_ensemble_parallel(const EnsembleSpec& spec, int threads) {
  const EnsembleInputs in = prepare_ensemble(spec);
  EnsembleResult res;
  res.rho_grid = spec.rho_grid;
  const auto n_rho = static_cast<long>(spec.rho_grid.size());
  const long n_cells = static_cast<long>(spec.n_matrices) * n_rho;
  res.cells.resize(static_cast<std::size_t>(n_cells));
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long c = 0; c < n_cells; ++c)
    res.cells[static_cast<std::size_t>(c)] =
        ensemble_cell(spec, in, static_cast<int>(c / n_rho), static_cast<std::size_t>(c % n_rho));
  return res;
}

}  // namespace confab
