#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "catnh/config.hpp"
#include "catnh/dataset.hpp"
#include "catnh/effective.hpp"
#include "catnh/two_kpo.hpp"

namespace catnh {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitValidation = 4,
};

/// Exit code for an exception escaping a run.
int exit_code_for(const std::exception& e);
/// Class name of a library error ("TruncationError", ...), "error" otherwise.
std::string error_kind(const std::exception& e);

/// Datasets and files produced by one command.
struct RunOutput {
  std::vector<SweepResult> datasets;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notes;
  int exit_code = kExitOk;

  const SweepResult& dataset(const std::string& name) const;
};

/// Full master equation against the effective dimer at one amplitude, starting
/// from |C₊>. Populations are renormalized to the cat subspace.
struct Fig2Trajectory {
  double alpha;
  int dim;
  GainSite gain;
  double gamma;
  double epsilon;
  std::vector<double> times;
  std::vector<double> full_plus;
  std::vector<double> full_minus;
  std::vector<double> full_leakage;  // weight outside span{C₊, C₋}, unnormalized
  std::vector<double> eff_plus;
  std::vector<double> eff_minus;
  double max_discrepancy;  // max_t |p₊^full − p₊^eff|
  double max_trace_error;
  double max_hermiticity_error;
};

Fig2Trajectory fig2_trajectory(const ExperimentConfig& cfg, double alpha);

/// Ascending grid min, min + step, ... (the end point included up to rounding).
std::vector<double> alpha_grid(const ExperimentConfig& cfg);

RunOutput run_fig2(const ExperimentConfig& cfg);
RunOutput run_fig3(const ExperimentConfig& cfg);
RunOutput run_fig4(const ExperimentConfig& cfg);
/// α sweep of the dimer quantities, optionally with the full-model fidelity.
RunOutput run_custom_sweep(const ExperimentConfig& cfg);

struct ValidationCheck {
  std::string suite;
  std::string name;
  double measured = 0.0;
  std::string relation;  // "<" or ">"
  double threshold = 0.0;
  bool pass = false;
  std::string error;  // error kind and message when the check threw
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> notes;

  bool all_pass() const;
  std::string to_text() const;
  nlohmann::json to_json() const;
};

/// Runs every invariant suite. Errors raised inside a check are recorded on
/// that check rather than propagated.
ValidationReport run_validation_suites(const ExperimentConfig& cfg);
/// Writes validation.txt and validation.json; exit code 4 on any failure.
RunOutput run_validate(const ExperimentConfig& cfg);

/// Worst deviation of the analytic two-qubit eigensystem from the general
/// eigensolver over random (J, Δ, δ) draws.
struct DrawStatistics {
  int draws = 0;
  int skipped_near_ep = 0;
  double max_eigenvalue_error = 0.0;
  double max_eigenvector_error = 0.0;  // 1 − |<analytic|numeric>|
  double max_residual = 0.0;           // ‖M v − E v‖
  double max_concurrence_error = 0.0;  // formula vs spin-flip oracle
};

DrawStatistics two_qubit_draws(int draws, unsigned long seed);

/// Dispatches on cfg.experiment.
RunOutput run_experiment(const ExperimentConfig& cfg);

}  // namespace catnh
