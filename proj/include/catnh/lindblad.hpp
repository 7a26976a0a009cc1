#pragma once

#include <map>
#include <string>
#include <vector>

#include "catnh/fock.hpp"

namespace catnh {

struct CollapseTerm {
  Operator op;
  double rate;  // units of K
};

/// Input for one master-equation run. Times are in units of 1/K.
struct EvolutionSpec {
  Operator hamiltonian;
  std::vector<CollapseTerm> collapse_ops = {};
  double t_final = 50.0;
  std::vector<double> sample_times = {};
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// A sampled state with min eigenvalue below this raises PositivityLoss.
  double positivity_floor = -1e-6;
  /// Population above Fock level dim - edge_levels must stay below
  /// edge_population_limit, else TruncationError. Negative limit disables.
  int edge_levels = 5;
  double edge_population_limit = 1e-10;
  long max_steps = 50'000'000;

  /// Uniform grid of n samples on [0, t_final].
  static std::vector<double> uniform_times(double t_final, int n);
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  /// Per-sample diagnostics: "trace_error", "hermiticity_error", "purity",
  /// "min_eigenvalue", "edge_population".
  std::map<std::string, std::vector<double>> observables;
  long rhs_evaluations = 0;
};

/// D[A]ρ = AρA† - ½(A†Aρ + ρA†A).
CMatrix dissipator(const Operator& a_op, const DensityMatrix& rho);

/// Integrates ρ̇ = -i[H, ρ] + Σ rate·D[A]ρ with an adaptive Dormand–Prince
/// 5(4) pair, stepping onto every sample time.
Trajectory evolve_master(const DensityMatrix& initial, const EvolutionSpec& spec);

struct CatPopulations {
  double p_plus;
  double p_minus;
  double leakage;  // 1 - p_plus - p_minus
};

CatPopulations cat_subspace_populations(const DensityMatrix& rho, const CatBasis& basis);

}  // namespace catnh
