#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "catnh/errors.hpp"

namespace catnh {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Truncated bosonic Hilbert space holding Fock levels 0..dim-1.
class FockSpace {
 public:
  explicit FockSpace(int dim);

  int dim() const { return dim_; }
  friend bool operator==(FockSpace a, FockSpace b) { return a.dim_ == b.dim_; }

 private:
  int dim_;
};

/// Dense operator on a FockSpace.
class Operator {
 public:
  Operator(FockSpace space, CMatrix matrix);

  FockSpace space() const { return space_; }
  int dim() const { return space_.dim(); }
  const CMatrix& matrix() const { return matrix_; }

  Operator adjoint() const;
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);

 private:
  FockSpace space_;
  CMatrix matrix_;
};

class StateVector {
 public:
  StateVector(FockSpace space, CVector amplitudes);

  static StateVector fock(FockSpace space, int n);

  FockSpace space() const { return space_; }
  int dim() const { return space_.dim(); }
  const CVector& amplitudes() const { return amplitudes_; }
  cplx operator[](int n) const { return amplitudes_(n); }

  double norm() const { return amplitudes_.norm(); }
  StateVector normalized() const;
  /// <this|other>
  cplx inner(const StateVector& other) const;
  cplx expectation(const Operator& op) const;

  friend StateVector operator*(const Operator& op, const StateVector& psi);

 private:
  FockSpace space_;
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix(FockSpace space, CMatrix matrix);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(FockSpace space);

  FockSpace space() const { return space_; }
  int dim() const { return space_.dim(); }
  const CMatrix& matrix() const { return matrix_; }

  cplx trace() const { return matrix_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double purity() const;
  cplx expectation(const Operator& op) const;
  /// <psi|rho|psi>
  double population(const StateVector& psi) const;

  /// Throws InvalidArgument unless Hermitian, unit trace and PSD within the
  /// physical-state tolerances.
  void require_physical(double hermitian_tol = 1e-10, double trace_tol = 1e-10,
                        double psd_floor = -1e-8) const;

 private:
  FockSpace space_;
  CMatrix matrix_;
};

enum class Parity { Plus, Minus };

inline double sign_of(Parity p) { return p == Parity::Plus ? 1.0 : -1.0; }
inline const char* to_string(Parity p) { return p == Parity::Plus ? "+" : "-"; }

/// The logical cat pair |C±> = N±(|α> ± |-α>).
struct CatBasis {
  double alpha;
  double n_plus;
  double n_minus;
  double p;  // N+/N-
  StateVector c_plus;
  StateVector c_minus;

  const StateVector& state(Parity parity) const {
    return parity == Parity::Plus ? c_plus : c_minus;
  }
};

Operator make_annihilation(FockSpace space);
Operator make_creation(FockSpace space);
Operator make_number(FockSpace space);
/// Photon parity (-1)^(a†a).
Operator make_parity(FockSpace space);
Operator make_identity(FockSpace space);

/// log10 of the coherent-state tail bound e^(-α²) α^(2 dim) / dim!.
double coherent_tail_log10(double alpha, int dim);
/// Throws TruncationError when the coherent tail bound at |alpha| exceeds 1e-14.
void require_truncation(double alpha, FockSpace space);

StateVector coherent_state(double alpha, FockSpace space);

/// Closed-form cat normalization [2(1 ± e^(-2α²))]^(-1/2).
double cat_normalization(double alpha, Parity parity);

/// Smallest amplitude accepted for the odd cat.
inline constexpr double kMinCatAmplitude = 1e-3;

StateVector cat_state(double alpha, Parity parity, FockSpace space);
CatBasis make_cat_basis(double alpha, FockSpace space);

/// D(α) = exp[α(a† - a)] by dense matrix exponential.
Operator make_displacement(double alpha, FockSpace space);

/// Fock levels n < interior_dim(α, dim) are unaffected by the cutoff when
/// displacing by α.
int displacement_interior_dim(double alpha, int dim);

/// <k|D(β)|k> = e^(-β²/2) L_k(β²) for real β.
double displaced_fock_diagonal(double beta, int k);

struct DisplacedFockPair {
  StateVector state;
  double normalization;  // closed form [2(1 ± <k|D(-2α)|k>)]^(-1/2)
};

/// N±ᵏ (D(α)|k> ± D(-α)|k>), the large-α approximation of the k-th excited
/// KPO doublet.
DisplacedFockPair displaced_fock_superposition(double alpha, int k, Parity sign,
                                               FockSpace space);

struct HermitianEigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

HermitianEigensystem eig_hermitian(const Operator& op);
HermitianEigensystem eig_hermitian(const CMatrix& m);

/// Eigensystem of a small non-Hermitian matrix. Left vectors satisfy
/// left.col(i)^† right.col(j) = δij whenever !defective.
struct GeneralEigensystem {
  CVector values;
  CMatrix right;
  CMatrix left;
  double condition;  // 2-norm condition number of the unit-column right matrix
  bool defective;
};

inline constexpr double kDefectiveCondition = 1e8;

GeneralEigensystem eig_general(const CMatrix& m);

CMatrix expm(const CMatrix& m);

/// Rotate so the largest-magnitude component is real positive.
void fix_global_phase(CVector& v);
void fix_global_phase_columns(CMatrix& m);

}  // namespace catnh
