#pragma once

#include <array>
#include <string>
#include <vector>

#include "catnh/kpo.hpp"

namespace catnh {

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

/// Closed-form normalizations entering the leakage channels at amplitude α.
struct LeakageCoefficients {
  double p;         // N₊/N₋
  double n_plus;    // N₊
  double n_minus;   // N₋
  double n1_plus;   // N₊¹
  double n1_minus;  // N₋¹
  double odd_cat;   // p N₊/N₊¹, channel |C₋> → |ψ₊¹>
  double even_cat;  // p⁻¹ N₋/N₋¹, channel |C₊> → |ψ₋¹>
};

LeakageCoefficients leakage_coefficients(double alpha);

/// √(rate_coefficient) |target><source cat|.
struct LeakageChannel {
  Parity source;
  StateVector target;
  double rate_coefficient;
  Operator op;
};

struct LeakageChannels {
  LeakageChannel l1;  // from |C₋>
  LeakageChannel l2;  // from |C₊>
};

/// Builds L₁, L₂ with the exact first excited eigenstates as targets. The
/// target of a channel is the first excited state of the photon-parity sector
/// that a†a maps the source cat into.
LeakageChannels leakage_channels(const KpoSpectrum& spectrum, const CatBasis& basis);

/// Projection of a†a onto the KPO eigenbasis.
struct LeakageReport {
  double alpha;
  Matrix2c number_in_subspace;  // <Cᵢ|a†a|Cⱼ>, order (C₊, C₋)
  /// |<k-th excited state of the cat's sector|a†a|C±>|² for k = 1..4.
  std::array<double, 4> manifold_weight_plus;
  std::array<double, 4> manifold_weight_minus;
  /// ‖(1 - P_cat) a†a |C±>‖².
  double out_of_subspace_plus;
  double out_of_subspace_minus;
  double k1_fraction_plus;
  double k1_fraction_minus;
  /// |<ψ¹|a†a|C±>|²/α² from exact eigenvectors.
  double projected_coefficient_plus;
  double projected_coefficient_minus;
  LeakageCoefficients closed_form;
  /// Overlap² of D(α)|1> ± D(-α)|1> with the exact first excited state of the
  /// same parity.
  double displaced_overlap_plus_sign;
  double displaced_overlap_minus_sign;
  /// Which cat leaks faster out of the subspace (from the exact weights).
  Parity faster_leaking;
  bool k1_dominant;  // both k1 fractions above 0.95

  std::vector<std::string> notes() const;
};

LeakageReport validate_leakage_model(const KpoSpectrum& spectrum, const CatBasis& basis);

/// γ = (κᵠα²/2)[p⁻¹N₋/N₋¹ − pN₊/N₊¹], units of K.
double gamma_rate(double alpha, double kappa_phi);

/// γ rebuilt from the eigenbasis projection |<ψ¹|a†a|C±>|²/α² instead of the
/// closed-form normalizations.
double gamma_rate_projected(double alpha, double kappa_phi);

/// ε = 2αΩ.
double epsilon_coupling(double alpha, double omega);

/// [[iγ, ε], [ε, −iγ]] in gain-site-first order.
struct PtDimer {
  double gamma;
  double epsilon;
  Matrix2c matrix;

  /// max |σₓ H* σₓ − H|.
  double pt_symmetry_error() const;
};

PtDimer build_pt_dimer(double gamma, double epsilon);

/// Which cat carries the +iγ entry when the dimer acts on (|C₊>, |C₋>).
enum class GainSite { Plus, Minus };

/// The dimer written in the (|C₊>, |C₋>) basis.
Matrix2c cat_frame_hamiltonian(const PtDimer& dimer, GainSite gain);

/// The slower-leaking cat is the gain site once the common decay is removed.
GainSite physical_gain_site(double alpha);

enum class PtPhase { Exact, Broken, ExceptionalPoint };
const char* to_string(PtPhase phase);

inline constexpr double kEpRelTol = 1e-9;

struct PtDiagnosis {
  PtPhase phase;
  std::array<cplx, 2> eigenvalues;  // (E₊, E₋)
  Matrix2c right;                   // columns |φ±>, unit norm
  Matrix2c left;                    // biorthogonal partners (unit norm at the EP)
  double theta;                     // asin(γ/ε) or acosh(γ/ε); π/2 at the EP
  bool defective;
};

PtDiagnosis diagnose_pt(const PtDimer& dimer);

struct EffectiveSample {
  double t;
  double p_first;   // population of the first basis state relative to the initial total
  double p_second;
};

/// Pure-state propagation ψ(t) = e^(−iHt) ψ₀ for any 2×2 generator.
std::vector<EffectiveSample> evolve_effective(const Vector2c& initial, const Matrix2c& h,
                                              const std::vector<double>& times);
/// ρ(t) = e^(−iHt) ρ₀ e^(+iH†t).
std::vector<EffectiveSample> evolve_effective(const Matrix2c& initial, const Matrix2c& h,
                                              const std::vector<double>& times);

/// Root of γ(α) − 2αΩ on the bracket. Throws NoSignChange.
double find_ep_alpha(double omega, double kappa_phi, double lo, double hi);

}  // namespace catnh
