#include "catnh/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace catnh {

namespace {

void require_same_space(FockSpace a, FockSpace b, const char* what) {
  if (!(a == b)) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

FockSpace::FockSpace(int dim) : dim_(dim) {
  if (dim < 2) throw InvalidArgument("FockSpace: dim must be >= 2, got " + std::to_string(dim));
}

// ---------------------------------------------------------------------------
// Operator / StateVector / DensityMatrix

Operator::Operator(FockSpace space, CMatrix matrix) : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw DimensionMismatch("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + ", space dim " +
                            std::to_string(space_.dim()));
  }
}

Operator Operator::adjoint() const { return Operator(space_, matrix_.adjoint()); }

double Operator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "Operator +");
  return Operator(a.space_, a.matrix_ + b.matrix_);
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "Operator -");
  return Operator(a.space_, a.matrix_ - b.matrix_);
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space_, b.space_, "Operator *");
  return Operator(a.space_, a.matrix_ * b.matrix_);
}

Operator operator*(cplx s, const Operator& a) { return Operator(a.space_, s * a.matrix_); }

StateVector::StateVector(FockSpace space, CVector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dim()) {
    throw DimensionMismatch("StateVector: length " + std::to_string(amplitudes_.size()) +
                            ", space dim " + std::to_string(space_.dim()));
  }
}

StateVector StateVector::fock(FockSpace space, int n) {
  if (n < 0 || n >= space.dim()) throw InvalidArgument("fock state index out of range");
  CVector v = CVector::Zero(space.dim());
  v(n) = 1.0;
  return StateVector(space, std::move(v));
}

StateVector StateVector::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) throw NumericError("cannot normalize the zero vector");
  return StateVector(space_, amplitudes_ / nrm);
}

cplx StateVector::inner(const StateVector& other) const {
  require_same_space(space_, other.space_, "inner product");
  return amplitudes_.dot(other.amplitudes_);
}

cplx StateVector::expectation(const Operator& op) const {
  require_same_space(space_, op.space(), "expectation");
  return amplitudes_.dot(op.matrix() * amplitudes_);
}

StateVector operator*(const Operator& op, const StateVector& psi) {
  require_same_space(op.space(), psi.space_, "Operator * StateVector");
  return StateVector(psi.space_, op.matrix() * psi.amplitudes_);
}

DensityMatrix::DensityMatrix(FockSpace space, CMatrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw DimensionMismatch("DensityMatrix: shape does not match space");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(FockSpace space) {
  return DensityMatrix(space, CMatrix::Identity(space.dim(), space.dim()) / double(space.dim()));
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const CMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double DensityMatrix::purity() const {
  // tr(ρ²) = Σ ρij ρji
  return (matrix_.cwiseProduct(matrix_.transpose())).sum().real();
}

cplx DensityMatrix::expectation(const Operator& op) const {
  require_same_space(space_, op.space(), "expectation");
  return (op.matrix() * matrix_).trace();
}

double DensityMatrix::population(const StateVector& psi) const {
  require_same_space(space_, psi.space(), "population");
  return psi.amplitudes().dot(matrix_ * psi.amplitudes()).real();
}

void DensityMatrix::require_physical(double hermitian_tol, double trace_tol,
                                     double psd_floor) const {
  if (hermiticity_error() > hermitian_tol) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(trace() - 1.0) > trace_tol) throw InvalidArgument("density matrix trace != 1");
  if (min_eigenvalue() < psd_floor) throw InvalidArgument("density matrix is not PSD");
}

// ---------------------------------------------------------------------------
// Ladder operators

Operator make_annihilation(FockSpace space) {
  const int d = space.dim();
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return Operator(space, std::move(a));
}

Operator make_creation(FockSpace space) { return make_annihilation(space).adjoint(); }

Operator make_number(FockSpace space) {
  const int d = space.dim();
  CMatrix n = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = double(k);
  return Operator(space, std::move(n));
}

Operator make_parity(FockSpace space) {
  const int d = space.dim();
  CMatrix p = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return Operator(space, std::move(p));
}

Operator make_identity(FockSpace space) {
  return Operator(space, CMatrix::Identity(space.dim(), space.dim()));
}

// ---------------------------------------------------------------------------
// Coherent and cat states

double coherent_tail_log10(double alpha, int dim) {
  const double a2 = alpha * alpha;
  if (a2 == 0.0) return -std::numeric_limits<double>::infinity();
  const double ln = -a2 + 2.0 * dim * std::log(std::abs(alpha)) - std::lgamma(dim + 1.0);
  return ln / std::log(10.0);
}

void require_truncation(double alpha, FockSpace space) {
  if (!std::isfinite(alpha)) throw InvalidArgument("amplitude must be finite");
  const double tail = coherent_tail_log10(alpha, space.dim());
  if (tail > -14.0) {
    throw TruncationError("Fock cutoff dim=" + std::to_string(space.dim()) +
                          " too small for alpha=" + std::to_string(alpha) +
                          " (log10 tail bound " + std::to_string(tail) + ")");
  }
}

StateVector coherent_state(double alpha, FockSpace space) {
  require_truncation(alpha, space);
  const int d = space.dim();
  CVector c(d);
  c(0) = std::exp(-0.5 * alpha * alpha);
  for (int n = 1; n < d; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  c /= c.norm();
  return StateVector(space, std::move(c));
}

double cat_normalization(double alpha, Parity parity) {
  const double overlap = std::exp(-2.0 * alpha * alpha);
  const double base = 2.0 * (1.0 + sign_of(parity) * overlap);
  if (base <= 0.0) throw DegenerateAmplitude("odd cat is undefined at alpha = 0");
  return 1.0 / std::sqrt(base);
}

StateVector cat_state(double alpha, Parity parity, FockSpace space) {
  if (alpha < 0.0) throw InvalidArgument("cat amplitude must be non-negative");
  if (parity == Parity::Minus && alpha < kMinCatAmplitude) {
    throw DegenerateAmplitude("odd cat requires alpha >= 1e-3, got " + std::to_string(alpha));
  }
  const CVector plus = coherent_state(alpha, space).amplitudes();
  const CVector minus = coherent_state(-alpha, space).amplitudes();
  CVector c = plus + sign_of(parity) * minus;
  c /= c.norm();
  // Exact parity: zero the components the symmetric sum cancels analytically.
  for (int n = (parity == Parity::Plus ? 1 : 0); n < space.dim(); n += 2) c(n) = 0.0;
  return StateVector(space, std::move(c));
}

CatBasis make_cat_basis(double alpha, FockSpace space) {
  StateVector cp = cat_state(alpha, Parity::Plus, space);
  StateVector cm = cat_state(alpha, Parity::Minus, space);
  const double np = cat_normalization(alpha, Parity::Plus);
  const double nm = cat_normalization(alpha, Parity::Minus);
  return CatBasis{alpha, np, nm, np / nm, std::move(cp), std::move(cm)};
}

// ---------------------------------------------------------------------------
// Displacement

int displacement_interior_dim(double alpha, int dim) {
  return dim - int(std::ceil(4.0 * std::abs(alpha))) - 4;
}

Operator make_displacement(double alpha, FockSpace space) {
  require_truncation(alpha, space);
  if (displacement_interior_dim(alpha, space.dim()) < 2) {
    throw TruncationError("Fock cutoff dim=" + std::to_string(space.dim()) +
                          " leaves no interior block for displacement by " +
                          std::to_string(alpha));
  }
  const CMatrix a = make_annihilation(space).matrix();
  const CMatrix gen = alpha * (a.adjoint() - a);
  return Operator(space, expm(gen));
}

double displaced_fock_diagonal(double beta, int k) {
  const double b2 = beta * beta;
  return std::exp(-0.5 * b2) * std::laguerre(unsigned(k), b2);
}

DisplacedFockPair displaced_fock_superposition(double alpha, int k, Parity sign,
                                               FockSpace space) {
  if (k < 1) throw InvalidArgument("displaced Fock superposition needs k >= 1");
  if (k >= displacement_interior_dim(alpha, space.dim())) {
    throw TruncationError("Fock cutoff too small for displaced |" + std::to_string(k) + ">");
  }
  const double overlap = displaced_fock_diagonal(-2.0 * alpha, k);
  const double base = 1.0 + sign_of(sign) * overlap;
  if (base < 1e-12) {
    throw DegenerateAmplitude("D(alpha)|k> and D(-alpha)|k> cancel at alpha=" +
                              std::to_string(alpha));
  }
  const double norm = 1.0 / std::sqrt(2.0 * base);
  const CMatrix dp = make_displacement(alpha, space).matrix();
  const CMatrix dm = make_displacement(-alpha, space).matrix();
  CVector v = dp.col(k) + sign_of(sign) * dm.col(k);
  v /= v.norm();
  return DisplacedFockPair{StateVector(space, std::move(v)), norm};
}

// ---------------------------------------------------------------------------
// Eigensolvers

void fix_global_phase(CVector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const double mag = std::abs(v(imax));
  if (mag == 0.0) return;
  v *= std::conj(v(imax)) / mag;
  v(imax) = mag;
}

void fix_global_phase_columns(CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    CVector col = m.col(j);
    fix_global_phase(col);
    m.col(j) = col;
  }
}

HermitianEigensystem eig_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig_hermitian: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("eig_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("Hermitian eigensolver failed");
  HermitianEigensystem out{es.eigenvalues(), es.eigenvectors()};
  fix_global_phase_columns(out.vectors);
  return out;
}

HermitianEigensystem eig_hermitian(const Operator& op) { return eig_hermitian(op.matrix()); }

GeneralEigensystem eig_general(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig_general: matrix is not square");
  const Eigen::Index n = m.rows();

  Eigen::ComplexEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("general eigensolver failed");

  // Deterministic order: descending real part, then descending imaginary part.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const CVector& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
    return ev(a).imag() > ev(b).imag();
  });

  GeneralEigensystem out;
  out.values.resize(n);
  out.right.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = ev(order[j]);
    CVector v = es.eigenvectors().col(order[j]);
    v.normalize();
    fix_global_phase(v);
    out.right.col(j) = v;
  }

  Eigen::JacobiSVD<CMatrix> svd(out.right);
  const RVector& sv = svd.singularValues();
  out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  out.defective = !(out.condition <= kDefectiveCondition);

  if (!out.defective) {
    out.left = out.right.inverse().adjoint();
  } else {
    // No biorthogonal normalization exists; return unit left vectors of m†
    // paired with the conjugate eigenvalue.
    Eigen::ComplexEigenSolver<CMatrix> adj(m.adjoint());
    out.left.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index best = 0;
      (adj.eigenvalues().array() - std::conj(out.values(j))).abs().minCoeff(&best);
      CVector w = adj.eigenvectors().col(best);
      w.normalize();
      fix_global_phase(w);
      out.left.col(j) = w;
    }
  }
  return out;
}

CMatrix expm(const CMatrix& m) { return m.exp(); }

}  // namespace catnh
