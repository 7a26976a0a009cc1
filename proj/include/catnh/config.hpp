#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace catnh {

/// `key = value` lines; '#' starts a comment. Duplicate keys are rejected.
struct KeyValueFile {
  std::map<std::string, std::string> entries;

  static KeyValueFile parse(const std::string& text, const std::string& origin = "<config>");
  static KeyValueFile load(const std::filesystem::path& path);
  /// Entries of `other` replace entries of this file.
  void merge(const KeyValueFile& other);
};

enum class Experiment {
  Fig2Dynamics,
  Fig2DiscrepancyMap,
  Fig2,  // both fig2 parts
  Fig3PtTransition,
  Fig4Entanglement,
  Validate,
  CustomSweep,
};

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

/// Every experiment parameter. Defaults reproduce the reference figures; rates are
/// in units of K (K₁ for the two-qubit model), times in units of 1/K.
struct ExperimentConfig {
  Experiment experiment = Experiment::Fig2;

  // single KPO
  double alpha = 1.5;
  double omega = 0.01;
  double kappa = 0.001;
  double alpha_min = 1.0;
  double alpha_max = 2.5;
  double alpha_step = 0.1;
  std::string gain_site = "physical";  // physical | plus | minus
  double ep_lo = 1.0;
  double ep_hi = 2.5;
  bool fidelity = false;

  // two KPOs
  double beta_min = 1.0;
  double beta_max = 3.0;
  double beta_step = 0.005;
  int refine = 10;
  double refine_window = 0.05;
  double coupling = 0.001;
  double kerr2_ratio = 1.0;
  double kappa1 = 0.05;
  double kappa2 = 0.05;

  // validation
  int draws = 1000;
  unsigned long seed = 20240601;

  // numerics
  int dim = 0;  // 0 = truncation rule
  double tol = 1e-8;
  double abs_tol = 1e-10;
  double t_final = 50.0;
  int samples = 501;

  // output
  std::filesystem::path out_dir = "out";
  bool plot_script = true;
  unsigned jobs = 0;

  static ExperimentConfig defaults(Experiment e);
  /// Applies entries on top of the experiment's defaults. An `experiment`
  /// entry must agree with `e` (or name one of its parts). Unknown keys throw
  /// ConfigError before anything is computed.
  static ExperimentConfig from_entries(Experiment e, const KeyValueFile& kv);

  void validate() const;
  /// Physical and numerical settings only (no output location or job count).
  nlohmann::json to_json() const;
  std::string hash() const;
};

}  // namespace catnh
