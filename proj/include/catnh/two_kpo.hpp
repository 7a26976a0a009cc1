#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "catnh/effective.hpp"

namespace catnh {

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

/// Two coupled KPOs; rates in units of K₁.
struct TwoKpoParams {
  double alpha = 2.0;
  double beta = 1.0;
  double coupling = 0.001;  // g
  double kerr2_ratio = 1.0;  // K₂/K₁
  double dephasing1 = 0.05;
  double dephasing2 = 0.05;

  void validate() const;
  double gamma1() const { return gamma_rate(alpha, dephasing1); }
  double gamma2() const { return gamma_rate(beta, dephasing2); }
  /// J = 2αβg.
  double j_eff() const { return 2.0 * alpha * beta * coupling; }
  std::vector<std::string> warnings() const;
};

/// The 4×4 model in the order |C₊C₊>, |C₊C₋>, |C₋C₊>, |C₋C₋>:
/// diag(iΔ, iδ, −iδ, −iΔ) plus J on the anti-diagonal.
struct TwoQubitNh {
  TwoKpoParams params;
  Matrix4c matrix;
  double delta_big;    // Δ = γ₁ + γ₂
  double delta_small;  // δ = γ₁ − γ₂
  double j_eff;        // J
};

TwoQubitNh build_two_kpo(const TwoKpoParams& params);
/// Same matrix from (J, Δ, δ) directly; params carries NaN amplitudes.
TwoQubitNh build_two_kpo_from_rates(double j_eff, double delta_big, double delta_small);

enum class Sector { F, S };
inline const char* to_string(Sector s) { return s == Sector::F ? "f" : "s"; }

struct EntangledEigenpair {
  Sector sector;
  Parity branch;
  cplx energy;   // ±√(J² − Δ²) or ±√(J² − δ²), principal root
  cplx cal_e;    // iΔ ± √(J² − Δ²) (f) or iδ ± √(J² − δ²) (s)
  Vector4c eigenvector;
  double concurrence;
  bool at_ep;
};

inline constexpr double kTwoQubitEpRelTol = 1e-9;

/// Order: f₊, f₋, s₊, s₋.
std::array<EntangledEigenpair, 4> analytic_eigensystem(const TwoQubitNh& model);

/// C = 2J|ℰ|/(J² + |ℰ|²). Throws UndefinedConcurrence when J = ℰ = 0.
double concurrence_formula(cplx cal_e, double j_eff);

/// Wootters concurrence |<ψ*|σy⊗σy|ψ>| of the normalized pure state.
double spin_flip_concurrence(const Vector4c& psi);

/// Matrix elements of g(a†b + ab†) between joint cat states, from the
/// single-mode cat matrix elements: (<C₊C₊|H|C₋C₋>, <C₊C₋|H|C₋C₊>).
std::pair<cplx, cplx> projected_coupling(double alpha, double beta, double coupling, int dim);

struct EntanglementRow {
  double beta;
  double gamma2;
  double delta_big;
  double delta_small;
  double j_eff;
  std::array<cplx, 4> energy;        // f₊, f₋, s₊, s₋
  std::array<double, 4> concurrence;
  std::array<double, 4> d_concurrence;  // dC/dβ, central differences on the grid
};

struct EntanglementSweep {
  TwoKpoParams base;
  std::vector<EntanglementRow> rows;
  std::optional<double> ep_f;  // J(β) = Δ(β)
  std::optional<double> ep_s;  // J(β) = |δ(β)|
  std::vector<std::string> notes;
};

/// β at which J(β) = Δ(β) (f) or J(β) = |δ(β)| (s) inside [lo, hi]. Throws
/// NoSignChange.
double find_ep_beta(const TwoKpoParams& base, Sector sector, double lo, double hi);

EntanglementSweep entanglement_sweep(const TwoKpoParams& base, const std::vector<double>& beta_grid,
                                     unsigned jobs = 1);

/// Uniform grid on [lo, hi] with extra points at step/refine within `window`
/// of each EP located on the coarse grid.
std::vector<double> refined_beta_grid(const TwoKpoParams& base, double lo, double hi, double step,
                                      int refine, double window);

/// Concurrence of the analytic eigenpair `index` (f₊, f₋, s₊, s₋) as a
/// function of β with all other parameters fixed.
double concurrence_at(const TwoKpoParams& base, double beta, int index);

}  // namespace catnh
