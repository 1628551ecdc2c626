#pragma once

#include "weinstein/lab/config.hpp"
#include "weinstein/lab/report.hpp"

namespace weinstein::lab {

/// Runs one experiment. Solver failures are caught and stored in
/// Report::failure with whatever was computed up to that point.
Report run_experiment(const ExperimentConfig& config);

/// Worker count for sweeps: WEINSTEIN_LAB_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned worker_count();

} // namespace weinstein::lab
