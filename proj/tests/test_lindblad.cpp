#include <doctest.h>

#include <cmath>

#include "catnh/errors.hpp"
#include "catnh/kpo.hpp"
#include "catnh/lindblad.hpp"

using namespace catnh;

namespace {

DensityMatrix outer(const StateVector& a, const StateVector& b) {
  return DensityMatrix(a.space(), a.amplitudes() * b.amplitudes().adjoint());
}

}  // namespace

TEST_SUITE("lindblad") {

TEST_CASE("dephasing dissipator") {
  const FockSpace space(40);
  const Operator n = make_number(space);
  const CatBasis b = make_cat_basis(1.5, space);

  CHECK(std::abs(dissipator(n, DensityMatrix::pure(b.c_plus)).trace()) < 1e-12);
  CHECK(dissipator(n, DensityMatrix::pure(StateVector::fock(space, 7))).norm() == 0.0);

  // Coherence block |C+><C-|: <C+|D[n]ρ|C-> = <n>₊<n>₋ − (<n²>₊ + <n²>₋)/2.
  const CMatrix out = dissipator(n, outer(b.c_plus, b.c_minus));
  CHECK(out.norm() > 0.0);
  auto moments = [&](const StateVector& c) {
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < space.dim(); ++k) {
      const double w = std::norm(c[k]);
      m1 += k * w;
      m2 += double(k) * k * w;
    }
    return std::make_pair(m1, m2);
  };
  const auto [p1, p2] = moments(b.c_plus);
  const auto [m1, m2] = moments(b.c_minus);
  const cplx projected = b.c_plus.amplitudes().dot(out * b.c_minus.amplitudes());
  CHECK(std::abs(projected - (p1 * m1 - 0.5 * (p2 + m2))) < 1e-12);
  CHECK(projected.real() < 0.0);
}

TEST_CASE("undriven cat is stationary") {
  const double alpha = 1.5;
  const FockSpace space(truncation_dim(alpha));
  EvolutionSpec spec{.hamiltonian = build_kpo_hamiltonian(KpoParams::from_alpha(alpha), space)};
  spec.t_final = 10.0;
  spec.sample_times = EvolutionSpec::uniform_times(10.0, 21);
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-12;
  const DensityMatrix rho0 = DensityMatrix::pure(make_cat_basis(alpha, space).c_plus);
  const Trajectory tr = evolve_master(rho0, spec);
  REQUIRE(tr.states.size() == 21);
  for (const auto& rho : tr.states) CHECK((rho.matrix() - rho0.matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("free-mode dephasing decays coherences analytically") {
  const FockSpace space(20);
  const double kappa = 0.05;
  EvolutionSpec spec{.hamiltonian = Operator(space, CMatrix::Zero(20, 20))};
  spec.collapse_ops.push_back({make_number(space), kappa});
  spec.t_final = 20.0;
  spec.sample_times = EvolutionSpec::uniform_times(20.0, 5);
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-12;
  spec.edge_population_limit = -1.0;
  const DensityMatrix rho0 = DensityMatrix::pure(coherent_state(1.0, space));
  const Trajectory tr = evolve_master(rho0, spec);
  double err = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    for (int m = 0; m < 20; ++m) {
      for (int n = 0; n < 20; ++n) {
        const double d = m - n;
        const cplx expect = rho0.matrix()(m, n) * std::exp(-kappa * d * d * tr.times[i] / 2.0);
        err = std::max(err, std::abs(tr.states[i].matrix()(m, n) - expect));
      }
    }
  }
  CHECK(err < 1e-8);
}

TEST_CASE("driven dephased run keeps a physical state") {
  const double alpha = 1.5;
  const KpoParams params = KpoParams::from_alpha(alpha, 0.01, 0.001);
  const FockSpace space(truncation_dim(alpha));
  EvolutionSpec spec{.hamiltonian = build_kpo_hamiltonian(params, space) + build_drive(params, space)};
  spec.collapse_ops.push_back({make_number(space), params.dephasing});
  spec.t_final = 5.0;
  spec.sample_times = EvolutionSpec::uniform_times(5.0, 6);
  const CatBasis basis = make_cat_basis(alpha, space);
  const Trajectory tr = evolve_master(DensityMatrix::pure(basis.c_plus), spec);
  for (double e : tr.observables.at("trace_error")) CHECK(e < 1e-8);
  for (double e : tr.observables.at("hermiticity_error")) CHECK(e < 1e-10);
  const CatPopulations pop = cat_subspace_populations(tr.states.back(), basis);
  CHECK(std::abs(pop.p_plus + pop.p_minus + pop.leakage - 1.0) < 1e-10);
  CHECK(pop.p_minus > 0.0);
  CHECK(tr.rhs_evaluations > 0);
}

TEST_CASE("cat subspace populations") {
  const FockSpace space(40);
  const CatBasis b = make_cat_basis(2.0, space);
  const CatPopulations pure = cat_subspace_populations(DensityMatrix::pure(b.c_plus), b);
  CHECK(pure.p_plus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(pure.p_minus) < 1e-14);
  CHECK(std::abs(pure.leakage) < 1e-14);
  const CatPopulations mixed = cat_subspace_populations(DensityMatrix::maximally_mixed(space), b);
  CHECK(std::abs(mixed.p_plus - 1.0 / 40) < 1e-12);
  CHECK(std::abs(mixed.p_minus - 1.0 / 40) < 1e-12);
}

TEST_CASE("evolution errors") {
  const FockSpace space(10);
  EvolutionSpec spec{.hamiltonian = make_number(space)};
  spec.t_final = 1.0;
  spec.sample_times = {0.0, 1.0};
  // Population sitting on the cutoff edge is a truncation failure.
  CHECK_THROWS_AS(evolve_master(DensityMatrix::pure(StateVector::fock(space, 9)), spec), TruncationError);

  spec.collapse_ops.push_back({make_number(space), -1.0});
  CHECK_THROWS_AS(evolve_master(DensityMatrix::pure(StateVector::fock(space, 0)), spec), InvalidArgument);

  spec.collapse_ops.clear();
  spec.sample_times = {0.5, 0.2};
  CHECK_THROWS_AS(evolve_master(DensityMatrix::pure(StateVector::fock(space, 0)), spec), InvalidArgument);
}

}  // TEST_SUITE
