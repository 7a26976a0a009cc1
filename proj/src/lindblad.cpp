#include "catnh/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace catnh {

namespace odeint = boost::numeric::odeint;

std::vector<double> EvolutionSpec::uniform_times(double t_final, int n) {
  if (n < 2) throw InvalidArgument("need at least two sample times");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t_final * double(i) / double(n - 1);
  t.back() = t_final;
  return t;
}

void EvolutionSpec::validate() const {
  if (!(t_final >= 0.0)) throw InvalidArgument("t_final must be >= 0");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      std::adjacent_find(sample_times.begin(), sample_times.end()) != sample_times.end()) {
    throw InvalidArgument("sample_times must be strictly ascending");
  }
  if (!sample_times.empty() && (sample_times.front() < 0.0 || sample_times.back() > t_final)) {
    throw InvalidArgument("sample_times must lie in [0, t_final]");
  }
  for (const auto& c : collapse_ops) {
    if (!(c.rate >= 0.0)) throw InvalidArgument("collapse rates must be >= 0");
    if (!(c.op.space() == hamiltonian.space())) {
      throw DimensionMismatch("collapse operator dimension differs from Hamiltonian");
    }
  }
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
}

CMatrix dissipator(const Operator& a_op, const DensityMatrix& rho) {
  if (!(a_op.space() == rho.space())) throw DimensionMismatch("dissipator: dimension mismatch");
  const CMatrix& a = a_op.matrix();
  const CMatrix ada = a.adjoint() * a;
  const CMatrix& r = rho.matrix();
  return a * r * a.adjoint() - 0.5 * (ada * r + r * ada);
}

namespace {

using State = std::vector<double>;

// ρ is carried as interleaved (re, im) pairs, column-major.
Eigen::Map<const CMatrix> as_matrix(const State& x, int d) {
  return Eigen::Map<const CMatrix>(reinterpret_cast<const cplx*>(x.data()), d, d);
}

Eigen::Map<CMatrix> as_matrix(State& x, int d) {
  return Eigen::Map<CMatrix>(reinterpret_cast<cplx*>(x.data()), d, d);
}

bool is_diagonal(const CMatrix& m) {
  return (m - CMatrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

// Right-hand side of the master equation. Every term is assembled as X + X†
// so Hermiticity of ρ is preserved structurally.
class MasterRhs {
 public:
  MasterRhs(const EvolutionSpec& spec, long& evaluations)
      : d_(spec.hamiltonian.dim()), h_(spec.hamiltonian.matrix()), evaluations_(evaluations) {
    diag_factor_ = CMatrix::Zero(d_, d_);
    bool any_diag = false;
    for (const auto& c : spec.collapse_ops) {
      if (c.rate == 0.0) continue;
      const CMatrix& a = c.op.matrix();
      if (is_diagonal(a)) {
        any_diag = true;
        for (int j = 0; j < d_; ++j)
          for (int i = 0; i < d_; ++i) {
            const cplx ai = a(i, i), aj = a(j, j);
            diag_factor_(i, j) +=
                c.rate * (ai * std::conj(aj) - 0.5 * (std::norm(ai) + std::norm(aj)));
          }
      } else {
        dense_.push_back({std::sqrt(c.rate) * a, c.rate * (a.adjoint() * a)});
      }
    }
    if (!any_diag) diag_factor_.resize(0, 0);
  }

  void operator()(const State& x, State& dxdt, double /*t*/) const {
    ++evaluations_;
    const auto rho = as_matrix(x, d_);
    auto out = as_matrix(dxdt, d_);
    CMatrix hr = h_ * rho;
    out.noalias() = -kI * hr;
    out.noalias() += kI * hr.adjoint();
    if (diag_factor_.size() > 0) out += diag_factor_.cwiseProduct(rho);
    for (const auto& term : dense_) {
      const CMatrix jump = term.scaled * rho * term.scaled.adjoint();
      const CMatrix anti = term.rate_ada * rho;
      out += 0.5 * (jump + jump.adjoint()) - 0.5 * (anti + anti.adjoint());
    }
  }

 private:
  struct DenseTerm {
    CMatrix scaled;    // √rate · A
    CMatrix rate_ada;  // rate · A†A
  };
  int d_;
  CMatrix h_;
  CMatrix diag_factor_;
  std::vector<DenseTerm> dense_;
  long& evaluations_;
};

}  // namespace

Trajectory evolve_master(const DensityMatrix& initial, const EvolutionSpec& spec) {
  spec.validate();
  if (!(initial.space() == spec.hamiltonian.space())) {
    throw DimensionMismatch("initial state and Hamiltonian dimensions differ");
  }
  if (!spec.hamiltonian.is_hermitian(1e-12 * std::max(1.0, spec.hamiltonian.matrix().cwiseAbs().maxCoeff()))) {
    throw InvalidArgument("Hamiltonian is not Hermitian");
  }
  initial.require_physical(1e-10, 1e-10, -1e-8);

  const int d = initial.dim();
  std::vector<double> times = spec.sample_times;
  if (times.empty()) times = {0.0, spec.t_final};

  Trajectory traj;
  State x(2 * std::size_t(d) * std::size_t(d));
  as_matrix(x, d) = initial.matrix();

  auto observe = [&](const State& s, double t) {
    const CMatrix m = as_matrix(s, d);
    DensityMatrix rho(initial.space(), m);
    const double min_eig = rho.min_eigenvalue();
    if (min_eig < spec.positivity_floor) {
      std::ostringstream os;
      os << "min eigenvalue " << min_eig << " at t=" << t;
      throw PositivityLoss(os.str());
    }
    double edge = 0.0;
    for (int n = std::max(0, d - spec.edge_levels); n < d; ++n) edge += m(n, n).real();
    if (spec.edge_population_limit >= 0.0 && edge > spec.edge_population_limit) {
      std::ostringstream os;
      os << "population " << edge << " above Fock level " << d - spec.edge_levels << " at t=" << t;
      throw TruncationError(os.str());
    }
    traj.observables["trace_error"].push_back(std::abs(m.trace() - 1.0));
    traj.observables["hermiticity_error"].push_back(rho.hermiticity_error());
    traj.observables["purity"].push_back(rho.purity());
    traj.observables["min_eigenvalue"].push_back(min_eig);
    traj.observables["edge_population"].push_back(edge);
    traj.times.push_back(t);
    traj.states.push_back(std::move(rho));
  };

  MasterRhs rhs(spec, traj.rhs_evaluations);
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(spec.abs_tol, spec.rel_tol);
  const double span = times.back() - times.front();
  const double dt0 = span > 0.0 ? std::min(1e-3, span) : 1e-3;
  try {
    odeint::integrate_times(stepper, std::ref(rhs), x, times.begin(), times.end(), dt0, observe,
                            odeint::max_step_checker(int(std::min<long>(spec.max_steps, 2'000'000'000L))));
  } catch (const odeint::step_adjustment_error& e) {
    throw StepSizeUnderflow(std::string("step size control failed: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw StepSizeUnderflow(std::string("integrator made no progress: ") + e.what());
  }
  return traj;
}

CatPopulations cat_subspace_populations(const DensityMatrix& rho, const CatBasis& basis) {
  if (!(rho.space() == basis.c_plus.space())) {
    throw DimensionMismatch("cat basis and density matrix dimensions differ");
  }
  const double pp = rho.population(basis.c_plus);
  const double pm = rho.population(basis.c_minus);
  return CatPopulations{pp, pm, rho.trace().real() - pp - pm};
}

}  // namespace catnh
