#pragma once

#include <string>
#include <utility>
#include <vector>

#include "catnh/fock.hpp"

namespace catnh {

/// Kerr parametric oscillator parameters. Energies and rates are in units of
/// the Kerr amplitude K.
struct KpoParams {
  double kerr = 1.0;                 // K > 0
  double drive_two_photon = 0.0;     // P >= 0
  double drive_single_photon = 0.0;  // Ω >= 0
  double dephasing = 0.0;            // κᵠ >= 0

  /// Parameters with P = Kα².
  static KpoParams from_alpha(double alpha, double omega = 0.0, double kappa = 0.0,
                              double kerr = 1.0);

  double alpha() const;
  /// Nominal gap 4Kα².
  double nominal_gap() const { return 4.0 * kerr * alpha() * alpha(); }

  /// Throws InvalidArgument on sign violations.
  void validate() const;
  /// Soft-constraint violations (Ω not ≪ ω_gap).
  std::vector<std::string> warnings() const;
};

/// Default cutoff max(30, ceil(α² + 8α + 10)).
int truncation_dim(double alpha);

/// -K a†²a² + P(a†² + a²); the single-photon drive is not included.
Operator build_kpo_hamiltonian(const KpoParams& params, FockSpace space);

/// Ω(a† + a).
Operator build_drive(const KpoParams& params, FockSpace space);

struct KpoSpectrum {
  KpoParams params;
  FockSpace space;
  RVector eigenvalues;                // ascending
  std::vector<StateVector> eigenvectors;
  std::vector<Parity> parity_labels;  // Plus = even photon parity
  int cat_plus_idx;
  int cat_minus_idx;
  std::pair<int, int> first_excited_idx;  // (even, odd)
  double gap;  // mean cat energy minus mean first-excited energy

  /// Eigenvector indices of one parity sector, highest energy first. Entry 0 is
  /// the cat, entry k the k-th excited state of that sector.
  std::vector<int> sector_ladder(Parity parity) const;
};

/// Diagonalizes H_KPO per photon-parity sector and identifies the cat pair by
/// overlap with the analytic cats. Throws ClassificationFailure when the
/// cat/parity thresholds are not met.
KpoSpectrum diagonalize_kpo(const KpoParams& params, FockSpace space);

}  // namespace catnh
