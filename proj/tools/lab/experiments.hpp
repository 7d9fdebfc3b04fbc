#ifndef MCKEAN_LAB_EXPERIMENTS_HPP
#define MCKEAN_LAB_EXPERIMENTS_HPP

#include <iosfwd>

#include "lab/config.hpp"
#include "lab/output.hpp"

namespace mckean::lab {

enum ExitStatus : int {
  kSuccess = 0,
  kFailure = 1,  // I/O and anything unexpected
  kNumericalFailure = 2,
  kConfigFailure = 3,
};

// Runs the experiment into out. Library errors propagate.
void run_experiment(const ExperimentConfig& config, OutputDir& out);

// run_experiment plus manifest and error mapping; diagnostics go to log.
int execute(const ExperimentConfig& config, std::ostream& log);

}  // namespace mckean::lab

#endif  // MCKEAN_LAB_EXPERIMENTS_HPP
