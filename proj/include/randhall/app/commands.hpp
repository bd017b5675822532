#pragma once

#include "randhall/app/config.hpp"
#include "randhall/mild_solver.hpp"

#include <string>

namespace randhall::app {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailed = 1,
  kValidationError = 2,
  kSolverFailure = 3,
  kPartialEnsembleFailure = 4,
};

/// Kernel-norm scaling regression and Beta-integral checks. kCheckFailed if any tolerance fails.
int verify_kernels(const ExperimentConfig& cfg);
/// Picard solve, ETD reference run, cross-method, energy and optional regularity-gain reports.
int simulate(const ExperimentConfig& cfg);
/// Free-evolution norms of the randomized data over the ensemble: records, tail and moment CSVs.
/// kPartialEnsembleFailure when more than 1% of the draws fail.
int ensemble(const ExperimentConfig& cfg);
/// Random probe pairs through the Duhamel map; fitted C, lambda_bar and ball radius.
int contraction(const ExperimentConfig& cfg);

/// Runs `command` ("verify-kernels", "simulate", "ensemble", "contraction") and maps library
/// exceptions onto exit codes, printing a one-line diagnosis to stderr.
int run(const std::string& command, const std::string& config_path, const Overrides& overrides);

/// Solver settings and randomized data described by the document.
SolverConfig solver_config(const ExperimentConfig& cfg);

}  // namespace randhall::app
