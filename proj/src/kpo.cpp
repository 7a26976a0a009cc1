#include "catnh/kpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace catnh {

namespace {

constexpr double kCatOverlapMin = 0.99;
constexpr double kParityMin = 0.999;
constexpr double kDegeneracyTol = 1e-6;  // in units of K

}  // namespace

KpoParams KpoParams::from_alpha(double alpha, double omega, double kappa, double kerr) {
  return KpoParams{kerr, kerr * alpha * alpha, omega, kappa};
}

double KpoParams::alpha() const { return std::sqrt(drive_two_photon / kerr); }

void KpoParams::validate() const {
  if (!(kerr > 0.0)) throw InvalidArgument("Kerr amplitude must be positive");
  if (drive_two_photon < 0.0) throw InvalidArgument("two-photon drive must be >= 0");
  if (drive_single_photon < 0.0) throw InvalidArgument("single-photon drive must be >= 0");
  if (dephasing < 0.0) throw InvalidArgument("dephasing rate must be >= 0");
}

std::vector<std::string> KpoParams::warnings() const {
  std::vector<std::string> out;
  if (drive_single_photon > 0.0 && drive_single_photon >= 0.1 * nominal_gap()) {
    std::ostringstream os;
    os << "single-photon drive " << drive_single_photon << " is not << gap "
       << nominal_gap() << " (limit 0.1*4K*alpha^2)";
    out.push_back(os.str());
  }
  return out;
}

int truncation_dim(double alpha) {
  return std::max(30, int(std::ceil(alpha * alpha + 8.0 * alpha + 10.0)));
}

Operator build_kpo_hamiltonian(const KpoParams& params, FockSpace space) {
  params.validate();
  require_truncation(params.alpha(), space);
  const CMatrix a = make_annihilation(space).matrix();
  const CMatrix ad = a.adjoint();
  const CMatrix a2 = a * a;
  const CMatrix ad2 = ad * ad;
  CMatrix h = -params.kerr * (ad2 * a2) + params.drive_two_photon * (ad2 + a2);
  return Operator(space, std::move(h));
}

Operator build_drive(const KpoParams& params, FockSpace space) {
  const CMatrix a = make_annihilation(space).matrix();
  return Operator(space, params.drive_single_photon * (a + a.adjoint()));
}

std::vector<int> KpoSpectrum::sector_ladder(Parity parity) const {
  std::vector<int> idx;
  for (int i = 0; i < int(parity_labels.size()); ++i) {
    if (parity_labels[i] == parity) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return eigenvalues(a) > eigenvalues(b); });
  return idx;
}

KpoSpectrum diagonalize_kpo(const KpoParams& params, FockSpace space) {
  const Operator h = build_kpo_hamiltonian(params, space);
  const int d = space.dim();
  const CatBasis cats = make_cat_basis(params.alpha(), space);
  const CMatrix parity = make_parity(space).matrix();

  struct Level {
    double energy;
    CVector vec;
    Parity parity;
  };
  std::vector<Level> levels;
  levels.reserve(d);

  // H_KPO conserves photon parity, so each sector is diagonalized alone. This
  // keeps the exactly degenerate cat pair from mixing.
  for (Parity sector : {Parity::Plus, Parity::Minus}) {
    std::vector<int> fock;
    for (int n = (sector == Parity::Plus ? 0 : 1); n < d; n += 2) fock.push_back(n);
    const int m = int(fock.size());
    CMatrix block(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) block(i, j) = h.matrix()(fock[i], fock[j]);
    const HermitianEigensystem es = eig_hermitian(block);
    for (int k = 0; k < m; ++k) {
      CVector v = CVector::Zero(d);
      for (int i = 0; i < m; ++i) v(fock[i]) = es.vectors(i, k);
      levels.push_back({es.values(k), std::move(v), sector});
    }
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });

  KpoSpectrum out{params, space, RVector(d), {}, {}, -1, -1, {-1, -1}, 0.0};
  out.eigenvectors.reserve(d);
  for (int i = 0; i < d; ++i) {
    out.eigenvalues(i) = levels[i].energy;
    const double pi = levels[i].vec.dot(parity * levels[i].vec).real();
    if (std::abs(pi) < kParityMin) {
      throw ClassificationFailure("eigenstate " + std::to_string(i) + " has mixed parity");
    }
    out.parity_labels.push_back(pi > 0 ? Parity::Plus : Parity::Minus);
    out.eigenvectors.emplace_back(space, std::move(levels[i].vec));
  }

  auto locate_cat = [&](Parity sector) {
    const StateVector& target = cats.state(sector);
    int best = -1;
    double best_overlap = 0.0;
    for (int i = 0; i < d; ++i) {
      if (out.parity_labels[i] != sector) continue;
      const double ov = std::norm(target.inner(out.eigenvectors[i]));
      if (ov > best_overlap) {
        best_overlap = ov;
        best = i;
      }
    }
    if (best_overlap < kCatOverlapMin) {
      std::ostringstream os;
      os << "no eigenstate matches |C" << to_string(sector) << "> (best overlap " << best_overlap
         << ")";
      throw ClassificationFailure(os.str());
    }
    return best;
  };
  out.cat_plus_idx = locate_cat(Parity::Plus);
  out.cat_minus_idx = locate_cat(Parity::Minus);

  const double split = std::abs(out.eigenvalues(out.cat_plus_idx) - out.eigenvalues(out.cat_minus_idx));
  if (split > kDegeneracyTol * params.kerr) {
    throw ClassificationFailure("cat pair is not degenerate (split " + std::to_string(split) + ")");
  }

  auto next_below = [&](Parity sector, int cat_idx) {
    int best = -1;
    for (int i = 0; i < d; ++i) {
      if (i == cat_idx || out.parity_labels[i] != sector) continue;
      if (out.eigenvalues(i) > out.eigenvalues(cat_idx)) continue;
      if (best < 0 || out.eigenvalues(i) > out.eigenvalues(best)) best = i;
    }
    if (best < 0) throw ClassificationFailure("no excited state below the cat pair");
    return best;
  };
  out.first_excited_idx = {next_below(Parity::Plus, out.cat_plus_idx),
                           next_below(Parity::Minus, out.cat_minus_idx)};

  const double cat_mean =
      0.5 * (out.eigenvalues(out.cat_plus_idx) + out.eigenvalues(out.cat_minus_idx));
  const double exc_mean = 0.5 * (out.eigenvalues(out.first_excited_idx.first) +
                                 out.eigenvalues(out.first_excited_idx.second));
  out.gap = cat_mean - exc_mean;
  if (!(out.gap > 0.0)) throw ClassificationFailure("non-positive gap");
  return out;
}

}  // namespace catnh
