// Acceptance criteria, one PASS/FAIL line each. Exit status is the number of
// failing criteria (0 = all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "catnh/config.hpp"
#include "catnh/effective.hpp"
#include "catnh/experiments.hpp"
#include "catnh/lindblad.hpp"
#include "catnh/two_kpo.hpp"

using namespace catnh;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, error_kind(e) + ": " + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Tolerances and limits.
constexpr double kEpLo = 1.45, kEpHi = 1.55, kEpRuntime = 1.0;
constexpr double kFidelity = 0.01;
constexpr double kPhaseTol = 1e-10, kPhaseMargin = 0.02, kPhaseRuntime = 1.0;
constexpr double kConcurrenceAtEp = 1e-9, kEntanglementRuntime = 5.0;
constexpr double kGammaRel = 1e-6, kK1Share = 0.95, kLeakageRuntime = 10.0;
constexpr double kEigenTol = 1e-10, kDrawRuntime = 5.0;
constexpr int kDraws = 1000;
constexpr double kTraceTol = 1e-8, kHermTol = 1e-10, kDephasingTol = 1e-8, kPurityTol = 1e-8;
constexpr double kSlope = -0.5, kSlopeTol = 0.1;

std::vector<Fig2Trajectory> fidelity_runs;

}  // namespace

int main() {
  const ExperimentConfig fig2 = ExperimentConfig::defaults(Experiment::Fig2);
  const ExperimentConfig fig3 = ExperimentConfig::defaults(Experiment::Fig3PtTransition);
  const ExperimentConfig fig4 = ExperimentConfig::defaults(Experiment::Fig4Entanglement);

  criterion(1, "EP location", [&] {
    const auto start = Clock::now();
    const double star = find_ep_alpha(fig3.omega, fig3.kappa, 1.0, 2.5);
    const double t = elapsed(start);
    std::ostringstream os;
    os << "alpha* = " << star << " in [" << kEpLo << ", " << kEpHi << "], solve " << t << " s < " << kEpRuntime;
    return Outcome{star >= kEpLo && star <= kEpHi && t < kEpRuntime, os.str()};
  });

  criterion(2, "effective-model fidelity", [&] {
    std::ostringstream os;
    os.precision(3);
    bool ok = true;
    os << "max_t |p+ full - p+ eff| over Kt in [0, " << fig2.t_final << "]:";
    for (double a : {1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5}) {
      fidelity_runs.push_back(fig2_trajectory(fig2, a));
      const double d = fidelity_runs.back().max_discrepancy;
      ok = ok && d < kFidelity;
      os << " " << a << "->" << d;
    }
    os << " (limit " << kFidelity << ")";
    return Outcome{ok, os.str()};
  });

  criterion(3, "PT phase structure", [&] {
    const auto start = Clock::now();
    const double star = find_ep_alpha(fig3.omega, fig3.kappa, 1.0, 2.5);
    double worst_im = 0.0, worst_re = 0.0;
    int exact = 0, broken = 0;
    for (double a : alpha_grid(fig3)) {
      const PtDiagnosis d = diagnose_pt(build_pt_dimer(gamma_rate(a, fig3.kappa), epsilon_coupling(a, fig3.omega)));
      if (a > star + kPhaseMargin) {
        ++exact;
        for (const cplx& e : d.eigenvalues) worst_im = std::max(worst_im, std::abs(e.imag()));
      } else if (a < star - kPhaseMargin) {
        ++broken;
        for (const cplx& e : d.eigenvalues) worst_re = std::max(worst_re, std::abs(e.real()));
      }
    }
    const double t = elapsed(start);
    std::ostringstream os;
    os << exact << " points above alpha*: max|Im E| = " << worst_im << "; " << broken
       << " points below: max|Re E| = " << worst_re << " (limit " << kPhaseTol << "), " << t << " s";
    return Outcome{exact > 0 && broken > 0 && worst_im < kPhaseTol && worst_re < kPhaseTol && t < kPhaseRuntime,
                   os.str()};
  });

  criterion(4, "entanglement transition", [&] {
    const auto start = Clock::now();
    TwoKpoParams base;
    base.alpha = fig4.alpha;
    base.coupling = fig4.coupling;
    base.kerr2_ratio = fig4.kerr2_ratio;
    base.dephasing1 = fig4.kappa1;
    base.dephasing2 = fig4.kappa2;
    const auto grid =
        refined_beta_grid(base, fig4.beta_min, fig4.beta_max, fig4.beta_step, fig4.refine, fig4.refine_window);
    const EntanglementSweep sweep = entanglement_sweep(base, grid, 1);
    if (!sweep.ep_f || !sweep.ep_s) return Outcome{false, "an EP was not located"};
    std::ostringstream os;
    bool ok = true;
    for (int s = 0; s < 2; ++s) {
      const double ep = s == 0 ? *sweep.ep_f : *sweep.ep_s;
      double c_err = 0.0;
      for (int k = 2 * s; k < 2 * s + 2; ++k) c_err = std::max(c_err, std::abs(concurrence_at(base, ep, k) - 1.0));
      // Coalescence on the grid: first point where E± become real and equal in
      // magnitude for the sector; concurrence maximum: first point where C = 1.
      std::size_t coalesce = grid.size(), maximal = grid.size();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = sweep.rows[i];
        if (coalesce == grid.size() && std::abs(r.energy[2 * s].imag()) == 0.0) coalesce = i;
        if (maximal == grid.size() &&
            std::min(r.concurrence[2 * s], r.concurrence[2 * s + 1]) >= 1.0 - kConcurrenceAtEp)
          maximal = i;
      }
      const bool found = coalesce < grid.size() && maximal < grid.size();
      const double resolution = found && coalesce > 0 ? grid[coalesce] - grid[coalesce - 1] : 0.0;
      const double offset = found ? std::abs(grid[coalesce] - grid[maximal]) : INFINITY;
      ok = ok && c_err < kConcurrenceAtEp && found && offset <= resolution;
      os << (s == 0 ? "f" : "s") << ": beta* = " << ep << ", |C - 1| = " << c_err << ", coalescence vs C max "
         << offset << " <= " << resolution << "; ";
    }
    const double t = elapsed(start);
    os << t << " s";
    return Outcome{ok && t < kEntanglementRuntime, os.str()};
  });

  criterion(5, "leakage-rate oracle", [&] {
    const auto start = Clock::now();
    double worst_rel = 0.0, worst_alpha = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double a = 1.0 + 0.1 * i;
      const double g = gamma_rate(a, 0.05);
      const double rel = std::abs(g - gamma_rate_projected(a, 0.05)) / std::abs(g);
      if (rel > worst_rel) worst_rel = rel, worst_alpha = a;
    }
    double worst_share = 1.0, share_alpha = 0.0;
    for (int i = 0; i <= 15; ++i) {
      const double a = 1.0 + 0.1 * i;
      const FockSpace space(truncation_dim(a));
      const LeakageReport r =
          validate_leakage_model(diagonalize_kpo(KpoParams::from_alpha(a), space), make_cat_basis(a, space));
      const double share = std::min(r.k1_fraction_plus, r.k1_fraction_minus);
      if (share < worst_share) worst_share = share, share_alpha = a;
    }
    const double t = elapsed(start);
    std::ostringstream os;
    os << "max rel |gamma - gamma_proj| = " << worst_rel << " at alpha " << worst_alpha << " (limit " << kGammaRel
       << "); min k=1 share = " << worst_share << " at alpha " << share_alpha << " (limit " << kK1Share << "), "
       << t << " s";
    return Outcome{worst_rel < kGammaRel && worst_share > kK1Share && t < kLeakageRuntime, os.str()};
  });

  criterion(6, "analytic vs numeric eigensystem", [&] {
    const auto start = Clock::now();
    const DrawStatistics s = two_qubit_draws(kDraws, 20240601);
    const double t = elapsed(start);
    std::ostringstream os;
    os << s.draws - s.skipped_near_ep << "/" << s.draws << " draws (EP neighbourhoods skipped): eigenvalue "
       << s.max_eigenvalue_error << ", eigenvector " << s.max_eigenvector_error << ", residual " << s.max_residual
       << ", concurrence " << s.max_concurrence_error << " (limit " << kEigenTol << "), " << t << " s";
    const bool ok = s.max_eigenvalue_error < kEigenTol && s.max_eigenvector_error < kEigenTol &&
                    s.max_residual < kEigenTol && s.max_concurrence_error < kEigenTol && t < kDrawRuntime;
    return Outcome{ok, os.str()};
  });

  criterion(7, "integrator soundness", [&] {
    double trace = 0.0, herm = 0.0;
    for (const auto& r : fidelity_runs) {
      trace = std::max(trace, r.max_trace_error);
      herm = std::max(herm, r.max_hermiticity_error);
    }
    if (fidelity_runs.empty()) {
      const Fig2Trajectory r = fig2_trajectory(fig2, 1.5);
      trace = r.max_trace_error;
      herm = r.max_hermiticity_error;
    }

    // Free-mode dephasing against the closed-form coherence decay.
    const FockSpace free_space(20);
    const double kappa = 0.05;
    EvolutionSpec deph{.hamiltonian = Operator(free_space, CMatrix::Zero(20, 20))};
    deph.collapse_ops.push_back({make_number(free_space), kappa});
    deph.t_final = fig2.t_final;
    deph.sample_times = EvolutionSpec::uniform_times(fig2.t_final, 11);
    deph.rel_tol = 1e-10;
    deph.abs_tol = 1e-12;
    deph.edge_population_limit = -1.0;
    const DensityMatrix rho0 = DensityMatrix::pure(coherent_state(1.0, free_space));
    const Trajectory dt = evolve_master(rho0, deph);
    double deph_err = 0.0;
    for (std::size_t i = 0; i < dt.times.size(); ++i) {
      for (int m = 0; m < 20; ++m) {
        for (int n = 0; n < 20; ++n) {
          const double d = m - n;
          const cplx expect = rho0.matrix()(m, n) * std::exp(-kappa * d * d * dt.times[i] / 2.0);
          deph_err = std::max(deph_err, std::abs(dt.states[i].matrix()(m, n) - expect));
        }
      }
    }

    // Driven KPO without dephasing over the same window.
    const double alpha = fig2.alpha;
    const KpoParams params = KpoParams::from_alpha(alpha, fig2.omega, 0.0);
    const FockSpace space(truncation_dim(alpha));
    EvolutionSpec pure{.hamiltonian = build_kpo_hamiltonian(params, space) + build_drive(params, space)};
    pure.t_final = fig2.t_final;
    pure.sample_times = EvolutionSpec::uniform_times(fig2.t_final, 51);
    pure.rel_tol = 1e-10;
    pure.abs_tol = 1e-12;
    const Trajectory pt = evolve_master(DensityMatrix::pure(make_cat_basis(alpha, space).c_plus), pure);
    double purity_err = 0.0;
    for (double p : pt.observables.at("purity")) purity_err = std::max(purity_err, std::abs(p - 1.0));

    std::ostringstream os;
    os << "trace " << trace << " (limit " << kTraceTol << "), hermiticity " << herm << " (limit " << kHermTol
       << "), dephasing decay " << deph_err << " (limit " << kDephasingTol << "), purity " << purity_err
       << " (limit " << kPurityTol << ")";
    return Outcome{trace < kTraceTol && herm < kHermTol && deph_err < kDephasingTol && purity_err < kPurityTol,
                   os.str()};
  });

  criterion(8, "near-EP criticality", [&] {
    TwoKpoParams base;
    base.alpha = fig4.alpha;
    base.coupling = fig4.coupling;
    base.kerr2_ratio = fig4.kerr2_ratio;
    base.dephasing1 = fig4.kappa1;
    base.dephasing2 = fig4.kappa2;
    const double ep = find_ep_beta(base, Sector::F, fig4.beta_min, fig4.beta_max);
    // Approach from the broken side (C < 1); C ≡ 1 on the other side.
    std::vector<double> lx, ly;
    for (int i = 0; i <= 12; ++i) {
      const double h = std::pow(10.0, -5.0 + 3.0 * i / 12.0);
      const double b = ep - h;
      const double step = h / 10.0;
      const double d = (concurrence_at(base, b + step, 0) - concurrence_at(base, b - step, 0)) / (2.0 * step);
      lx.push_back(std::log10(h));
      ly.push_back(std::log10(std::abs(d)));
    }
    const double n = double(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::ostringstream os;
    os << "log-log slope of |dC/dbeta| vs h over [1e-5, 1e-2] = " << slope << " (target " << kSlope << " +/- "
       << kSlopeTol << ")";
    return Outcome{std::isfinite(slope) && std::abs(slope - kSlope) <= kSlopeTol, os.str()};
  });

  std::printf("%d criteria failing\n", failures);
  return failures;
}
