#include "catnh/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

namespace catnh {

LeakageCoefficients leakage_coefficients(double alpha) {
  if (alpha < kMinCatAmplitude) {
    throw DegenerateAmplitude("leakage coefficients need alpha >= 1e-3, got " +
                              std::to_string(alpha));
  }
  LeakageCoefficients c{};
  c.n_plus = cat_normalization(alpha, Parity::Plus);
  c.n_minus = cat_normalization(alpha, Parity::Minus);
  c.p = c.n_plus / c.n_minus;
  const double d1 = displaced_fock_diagonal(-2.0 * alpha, 1);
  if (1.0 - d1 < 1e-12 || 1.0 + d1 < 1e-12) {
    throw DegenerateAmplitude("first displaced-Fock pair is degenerate");
  }
  c.n1_plus = 1.0 / std::sqrt(2.0 * (1.0 + d1));
  c.n1_minus = 1.0 / std::sqrt(2.0 * (1.0 - d1));
  c.odd_cat = c.p * c.n_plus / c.n1_plus;
  c.even_cat = c.n_minus / (c.p * c.n1_minus);
  return c;
}

LeakageChannels leakage_channels(const KpoSpectrum& spectrum, const CatBasis& basis) {
  if (!(spectrum.space == basis.c_plus.space())) {
    throw DimensionMismatch("spectrum and cat basis dimensions differ");
  }
  const LeakageCoefficients c = leakage_coefficients(basis.alpha);
  auto make = [&](Parity source, int target_idx, double coeff) {
    const StateVector& target = spectrum.eigenvectors[target_idx];
    const StateVector& cat = basis.state(source);
    CMatrix op = std::sqrt(coeff) * (target.amplitudes() * cat.amplitudes().adjoint());
    return LeakageChannel{source, target, coeff, Operator(spectrum.space, std::move(op))};
  };
  // a†a conserves photon parity: |C₋> leaks into the odd sector, |C₊> into the even one.
  return LeakageChannels{make(Parity::Minus, spectrum.first_excited_idx.second, c.odd_cat),
                         make(Parity::Plus, spectrum.first_excited_idx.first, c.even_cat)};
}

std::vector<std::string> LeakageReport::notes() const {
  std::vector<std::string> out;
  std::ostringstream os;
  os << "faster-leaking cat: |C" << to_string(faster_leaking)
     << ">; the physical gain site is the slower-leaking cat";
  out.push_back(os.str());
  out.push_back(
      "eigenvector normalization (J^2 + |E|^2)^(-1/2) is used for the two-qubit states");
  if (!k1_dominant) {
    std::ostringstream k1;
    k1 << "k=1 manifold captures " << k1_fraction_plus << " (C+) and " << k1_fraction_minus
       << " (C-) of the out-of-subspace weight";
    out.push_back(k1.str());
  }
  return out;
}

LeakageReport validate_leakage_model(const KpoSpectrum& spectrum, const CatBasis& basis) {
  if (!(spectrum.space == basis.c_plus.space())) {
    throw DimensionMismatch("spectrum and cat basis dimensions differ");
  }
  const Operator number = make_number(spectrum.space);
  LeakageReport r{};
  r.alpha = basis.alpha;
  r.closed_form = leakage_coefficients(basis.alpha);

  const std::array<const StateVector*, 2> cats{&basis.c_plus, &basis.c_minus};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.number_in_subspace(i, j) = cats[i]->inner(number * *cats[j]);

  auto sector = [&](Parity parity, std::array<double, 4>& weights, double& out_weight) {
    const StateVector& cat = basis.state(parity);
    const CVector image = number.matrix() * cat.amplitudes();
    CVector outside = image;
    for (const StateVector* c : cats) outside -= c->amplitudes() * c->amplitudes().dot(image);
    out_weight = outside.squaredNorm();
    const std::vector<int> ladder = spectrum.sector_ladder(parity);
    for (int k = 1; k <= 4; ++k) {
      weights[k - 1] = k < int(ladder.size())
                           ? std::norm(spectrum.eigenvectors[ladder[k]].amplitudes().dot(image))
                           : 0.0;
    }
  };
  sector(Parity::Plus, r.manifold_weight_plus, r.out_of_subspace_plus);
  sector(Parity::Minus, r.manifold_weight_minus, r.out_of_subspace_minus);

  r.k1_fraction_plus = r.manifold_weight_plus[0] / r.out_of_subspace_plus;
  r.k1_fraction_minus = r.manifold_weight_minus[0] / r.out_of_subspace_minus;
  const double a2 = basis.alpha * basis.alpha;
  r.projected_coefficient_plus = r.manifold_weight_plus[0] / a2;
  r.projected_coefficient_minus = r.manifold_weight_minus[0] / a2;

  const auto& ladder_even = spectrum.sector_ladder(Parity::Plus);
  const auto& ladder_odd = spectrum.sector_ladder(Parity::Minus);
  const StateVector odd_pair =
      displaced_fock_superposition(basis.alpha, 1, Parity::Plus, spectrum.space).state;
  const StateVector even_pair =
      displaced_fock_superposition(basis.alpha, 1, Parity::Minus, spectrum.space).state;
  r.displaced_overlap_plus_sign = std::norm(odd_pair.inner(spectrum.eigenvectors[ladder_odd[1]]));
  r.displaced_overlap_minus_sign = std::norm(even_pair.inner(spectrum.eigenvectors[ladder_even[1]]));

  r.faster_leaking = r.out_of_subspace_plus >= r.out_of_subspace_minus ? Parity::Plus : Parity::Minus;
  r.k1_dominant = r.k1_fraction_plus > 0.95 && r.k1_fraction_minus > 0.95;
  return r;
}

double gamma_rate(double alpha, double kappa_phi) {
  if (kappa_phi < 0.0) throw InvalidArgument("dephasing rate must be >= 0");
  const LeakageCoefficients c = leakage_coefficients(alpha);
  return 0.5 * kappa_phi * alpha * alpha * (c.even_cat - c.odd_cat);
}

double gamma_rate_projected(double alpha, double kappa_phi) {
  const FockSpace space(truncation_dim(alpha));
  const KpoSpectrum spectrum = diagonalize_kpo(KpoParams::from_alpha(alpha), space);
  const LeakageReport r = validate_leakage_model(spectrum, make_cat_basis(alpha, space));
  return 0.5 * kappa_phi * alpha * alpha *
         (r.projected_coefficient_plus - r.projected_coefficient_minus);
}

double epsilon_coupling(double alpha, double omega) {
  if (alpha < 0.0 || omega < 0.0) throw InvalidArgument("alpha and omega must be >= 0");
  return 2.0 * alpha * omega;
}

double PtDimer::pt_symmetry_error() const {
  Matrix2c sx;
  sx << 0, 1, 1, 0;
  return (sx * matrix.conjugate() * sx - matrix).cwiseAbs().maxCoeff();
}

PtDimer build_pt_dimer(double gamma, double epsilon) {
  if (!(gamma >= 0.0) || !(epsilon >= 0.0)) throw InvalidArgument("gamma and epsilon must be >= 0");
  Matrix2c m;
  m << cplx(0.0, gamma), epsilon, epsilon, cplx(0.0, -gamma);
  return PtDimer{gamma, epsilon, m};
}

Matrix2c cat_frame_hamiltonian(const PtDimer& dimer, GainSite gain) {
  if (gain == GainSite::Plus) return dimer.matrix;
  Matrix2c sx;
  sx << 0, 1, 1, 0;
  return sx * dimer.matrix * sx;
}

GainSite physical_gain_site(double alpha) {
  const LeakageCoefficients c = leakage_coefficients(alpha);
  return c.even_cat >= c.odd_cat ? GainSite::Minus : GainSite::Plus;
}

const char* to_string(PtPhase phase) {
  switch (phase) {
    case PtPhase::Exact: return "exact";
    case PtPhase::Broken: return "broken";
    case PtPhase::ExceptionalPoint: return "EP";
  }
  return "?";
}

PtDiagnosis diagnose_pt(const PtDimer& dimer) {
  const double g = dimer.gamma;
  const double e = dimer.epsilon;
  if (g == 0.0 && e == 0.0) throw UndefinedDiagnosis("PT diagnosis undefined for gamma = epsilon = 0");

  PtDiagnosis d{};
  Matrix2c right;
  const double scale = std::max({g, e, 1e-30});
  if (std::abs(g - e) <= kEpRelTol * scale) {
    d.phase = PtPhase::ExceptionalPoint;
    d.eigenvalues = {0.0, 0.0};
    d.theta = std::numbers::pi / 2;
    d.defective = true;
    Vector2c v(1.0, -kI);
    v /= std::sqrt(2.0);
    Vector2c w(1.0, kI);
    w /= std::sqrt(2.0);
    d.right << v, v;
    d.left << w, w;
    return d;
  }
  if (g < e) {
    d.phase = PtPhase::Exact;
    d.theta = std::asin(g / e);
    const double en = e * std::cos(d.theta);
    d.eigenvalues = {en, -en};
    right.col(0) = Vector2c(1.0, std::exp(-kI * d.theta));
    right.col(1) = Vector2c(1.0, -std::exp(kI * d.theta));
  } else if (e == 0.0) {
    d.phase = PtPhase::Broken;
    d.theta = std::numeric_limits<double>::infinity();
    d.eigenvalues = {cplx(0.0, g), cplx(0.0, -g)};
    right.col(0) = Vector2c(1.0, 0.0);
    right.col(1) = Vector2c(0.0, 1.0);
  } else {
    d.phase = PtPhase::Broken;
    d.theta = std::acosh(g / e);
    const double en = e * std::sinh(d.theta);
    d.eigenvalues = {cplx(0.0, en), cplx(0.0, -en)};
    right.col(0) = Vector2c(1.0, -kI * std::exp(-d.theta));
    right.col(1) = Vector2c(1.0, -kI * std::exp(d.theta));
  }
  for (int j = 0; j < 2; ++j) {
    CVector v = right.col(j).normalized();
    fix_global_phase(v);
    right.col(j) = v;
  }
  d.right = right;
  d.left = right.inverse().adjoint();
  d.defective = false;
  return d;
}

std::vector<EffectiveSample> evolve_effective(const Vector2c& initial, const Matrix2c& h,
                                              const std::vector<double>& times) {
  const double norm0 = initial.squaredNorm();
  if (norm0 == 0.0) throw InvalidArgument("initial state has zero norm");
  std::vector<EffectiveSample> out;
  out.reserve(times.size());
  for (double t : times) {
    const Vector2c psi = expm(CMatrix(-kI * t * h)) * initial;
    out.push_back({t, std::norm(psi(0)) / norm0, std::norm(psi(1)) / norm0});
  }
  return out;
}

std::vector<EffectiveSample> evolve_effective(const Matrix2c& initial, const Matrix2c& h,
                                              const std::vector<double>& times) {
  const double tr0 = initial.trace().real();
  if (tr0 == 0.0) throw InvalidArgument("initial density matrix has zero trace");
  std::vector<EffectiveSample> out;
  out.reserve(times.size());
  for (double t : times) {
    const Matrix2c u = expm(CMatrix(-kI * t * h));
    const Matrix2c rho = u * initial * u.adjoint();
    out.push_back({t, rho(0, 0).real() / tr0, rho(1, 1).real() / tr0});
  }
  return out;
}

double find_ep_alpha(double omega, double kappa_phi, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("bracket must satisfy lo < hi");
  auto f = [&](double a) { return gamma_rate(a, kappa_phi) - epsilon_coupling(a, omega); };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "gamma - epsilon does not change sign on [" << lo << ", " << hi << "]";
    throw NoSignChange(os.str());
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (a + b);
}

}  // namespace catnh
