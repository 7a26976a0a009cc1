#include <doctest.h>

#include <cmath>

#include "catnh/errors.hpp"
#include "catnh/fock.hpp"

using namespace catnh;

TEST_SUITE("fock") {

TEST_CASE("ladder operators") {
  SUBCASE("smallest space") {
    const Operator a = make_annihilation(FockSpace(2));
    CHECK(a.matrix()(0, 1) == cplx(1.0, 0.0));
    CHECK(a.matrix()(0, 0) == cplx(0.0, 0.0));
    CHECK(a.matrix()(1, 0) == cplx(0.0, 0.0));
    CHECK(a.matrix()(1, 1) == cplx(0.0, 0.0));
  }
  SUBCASE("number operator on |3>") {
    const FockSpace space(10);
    const StateVector three = StateVector::fock(space, 3);
    const StateVector image = make_creation(space) * (make_annihilation(space) * three);
    CHECK((image.amplitudes() - 3.0 * three.amplitudes()).norm() < 1e-14);
  }
  SUBCASE("canonical commutator below the edge") {
    const FockSpace space(25);
    const CMatrix a = make_annihilation(space).matrix();
    const CMatrix comm = a * a.adjoint() - a.adjoint() * a;
    const int inner = space.dim() - 1;
    CHECK((comm.topLeftCorner(inner, inner) - CMatrix::Identity(inner, inner)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("dimension checks") {
    CHECK_THROWS_AS(FockSpace(1), InvalidArgument);
    CHECK_THROWS_AS(make_number(FockSpace(4)) + make_number(FockSpace(5)), DimensionMismatch);
  }
}

TEST_CASE("coherent states") {
  const FockSpace space(40);
  CHECK((coherent_state(0.0, space).amplitudes() - StateVector::fock(space, 0).amplitudes()).norm() == 0.0);

  const double overlap = coherent_state(-1.5, space).inner(coherent_state(1.5, space)).real();
  CHECK(std::abs(overlap - std::exp(-4.5)) < 1e-12);
  CHECK(std::abs(overlap - 1.1109e-2) < 1e-6);

  CHECK(std::abs(coherent_state(2.0, space).expectation(make_number(space)).real() - 4.0) < 1e-8);
  CHECK_THROWS_AS(coherent_state(4.0, FockSpace(12)), TruncationError);
}

TEST_CASE("cat normalizations") {
  const FockSpace space(40);
  const CatBasis b = make_cat_basis(1.5, space);
  CHECK(b.n_plus == doctest::Approx(0.703211582).epsilon(1e-9));
  CHECK(b.n_minus == doctest::Approx(0.711067434).epsilon(1e-9));
  CHECK(b.p == doctest::Approx(0.988952029).epsilon(1e-9));

  // Fock-space normalization of |α> ± |-α> agrees with the closed form.
  const CVector sum = coherent_state(1.5, space).amplitudes() + coherent_state(-1.5, space).amplitudes();
  const CVector diff = coherent_state(1.5, space).amplitudes() - coherent_state(-1.5, space).amplitudes();
  CHECK(1.0 / sum.norm() == doctest::Approx(b.n_plus).epsilon(1e-12));
  CHECK(1.0 / diff.norm() == doctest::Approx(b.n_minus).epsilon(1e-12));

  CHECK(make_cat_basis(4.0, FockSpace(70)).p == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(cat_state(0.0, Parity::Minus, space), DegenerateAmplitude);
  CHECK(std::abs(cat_state(0.0, Parity::Plus, space)[0] - 1.0) < 1e-15);
}

TEST_CASE("annihilation swaps the cats") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const FockSpace space(60);
    const CatBasis b = make_cat_basis(alpha, space);
    const CVector lhs = (make_annihilation(space) * b.c_plus).amplitudes();
    CHECK((lhs - alpha * b.p * b.c_minus.amplitudes()).norm() < 1e-10);
    const CVector lhs2 = (make_annihilation(space) * b.c_minus).amplitudes();
    CHECK((lhs2 - alpha / b.p * b.c_plus.amplitudes()).norm() < 1e-10);
  }
}

TEST_CASE("displacement") {
  const FockSpace space(40);
  CHECK((make_displacement(0.0, space).matrix() - CMatrix::Identity(40, 40)).norm() == 0.0);
  const StateVector d0 = make_displacement(1.3, space) * StateVector::fock(space, 0);
  CHECK((d0.amplitudes() - coherent_state(1.3, space).amplitudes()).norm() < 1e-10);

  // <1|D(-3)|1> = e^(-4.5)(1 - 9)
  const FockSpace wide(60);
  const double closed = std::exp(-4.5) * (1.0 - 9.0);
  CHECK(closed == doctest::Approx(-8.8872e-2).epsilon(1e-4));
  CHECK(std::abs(make_displacement(-3.0, wide).matrix()(1, 1).real() - closed) < 1e-10);
  CHECK(std::abs(displaced_fock_diagonal(-3.0, 1) - closed) < 1e-14);
  CHECK_THROWS_AS(make_displacement(6.0, FockSpace(20)), TruncationError);
}

TEST_CASE("displaced Fock superpositions") {
  const FockSpace space(40);
  const auto plus = displaced_fock_superposition(1.5, 1, Parity::Plus, space);
  const auto minus = displaced_fock_superposition(1.5, 1, Parity::Minus, space);
  CHECK(plus.normalization == doctest::Approx(0.74079032).epsilon(1e-8));
  CHECK(minus.normalization == doctest::Approx(0.677636191).epsilon(1e-8));
  // The numerically normalized state agrees with the closed form.
  const CVector raw = (make_displacement(1.5, space) * StateVector::fock(space, 1)).amplitudes() +
                      (make_displacement(-1.5, space) * StateVector::fock(space, 1)).amplitudes();
  CHECK(1.0 / raw.norm() == doctest::Approx(plus.normalization).epsilon(1e-10));
  // D(α)|1> + D(−α)|1> has odd photon parity.
  CHECK(plus.state.expectation(make_parity(space)).real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(minus.state.expectation(make_parity(space)).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(displaced_fock_superposition(0.0, 1, Parity::Minus, space), DegenerateAmplitude);
  CHECK_THROWS_AS(displaced_fock_superposition(1.5, 0, Parity::Plus, space), InvalidArgument);
}

TEST_CASE("eigensolvers") {
  SUBCASE("Hermitian limit of the dimer") {
    CMatrix m(2, 2);
    m << 0.0, 0.7, 0.7, 0.0;
    const GeneralEigensystem g = eig_general(m);
    CHECK(std::abs(g.values(0) - 0.7) < 1e-14);
    CHECK(std::abs(g.values(1) + 0.7) < 1e-14);
    CHECK(std::abs(g.right.col(0).dot(g.right.col(1))) < 1e-14);
    CHECK_FALSE(g.defective);
  }
  SUBCASE("Jordan block at the gain-loss balance point") {
    CMatrix m(2, 2);
    m << kI, 1.0, 1.0, -kI;
    const GeneralEigensystem g = eig_general(m);
    CHECK(std::abs(g.values(0)) < 1e-7);
    CHECK(std::abs(g.values(1)) < 1e-7);
    CHECK(g.defective);
  }
  SUBCASE("gain-loss dimer in the exact phase") {
    const double eps = 1.3;
    CMatrix m(2, 2);
    m << kI * 0.5 * eps, eps, eps, -kI * 0.5 * eps;
    const GeneralEigensystem g = eig_general(m);
    CHECK(std::abs(g.values(0) - eps * std::sqrt(0.75)) < 1e-12);
    CHECK(std::abs(g.values(1) + eps * std::sqrt(0.75)) < 1e-12);
    CHECK(std::abs((g.left.adjoint() * g.right - CMatrix::Identity(2, 2)).norm()) < 1e-12);
  }
  SUBCASE("non-Hermitian input to the Hermitian solver") {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(eig_hermitian(m), InvalidArgument);
  }
}

TEST_CASE("density matrices") {
  const FockSpace space(40);
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(space);
  CHECK(std::abs(mixed.trace() - 1.0) < 1e-14);
  CHECK(mixed.purity() == doctest::Approx(1.0 / 40));
  const DensityMatrix pure = DensityMatrix::pure(coherent_state(1.0, space));
  CHECK(pure.purity() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pure.min_eigenvalue() > -1e-12);
  CHECK_NOTHROW(pure.require_physical());
}

}  // TEST_SUITE
