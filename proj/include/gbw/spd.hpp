#pragma once

// Matrix-analysis kernel: validated symmetric / SPD value types and the
// spectral operations everything else is built on.

#include <Eigen/Dense>

#include <functional>

#include "gbw/errors.hpp"

namespace gbw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative positive-definiteness floor: λ_min > kPdFloor · λ_max.
inline constexpr double kPdFloor = 1e-12;

// Inputs whose relative asymmetry exceeds this are rejected rather than
// silently symmetrized; below it they are symmetrized.
inline constexpr double kSymmetryRejectTol = 1e-8;

/// (A + Aᵀ) / 2
Matrix sym_part(const Matrix& a);

/// max|A − Aᵀ| / max(1, max|A|)
double relative_asymmetry(const Matrix& a);

void require_square(const Matrix& a, const char* what);
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

/// Dense symmetric matrix; the tangent-vector and Euclidean-gradient type.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  // Unconditional (A + Aᵀ)/2 of any square matrix.
  static SymMatrix symmetric_part(const Matrix& a);
  static SymMatrix zero(Eigen::Index n);
  static SymMatrix identity(Eigen::Index n);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double norm() const { return m_.norm(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator-() const;
  SymMatrix operator*(double s) const;
  friend SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

 private:
  struct Trusted {};
  SymMatrix(Matrix a, Trusted) : m_(std::move(a)) {}
  Matrix m_;
};

/// Symmetric eigendecomposition with eigenvalues sorted descending.
struct EigPair {
  Vector values;
  Matrix vectors;  // columns are eigenvectors

  // Q f(Λ) Qᵀ
  Matrix reconstruct(const std::function<double(double)>& f) const;
};

/// Eigendecomposition of a symmetric matrix, values sorted descending.
/// Throws ComputationError if the solver does not converge.
EigPair sym_eig(const SymMatrix& a);
EigPair sym_eig(const Matrix& symmetric);

/// Validated symmetric positive definite matrix; the manifold point type.
/// The eigendecomposition computed during validation is cached, so spectral
/// functions (sqrt, inverse, log) cost two matrix products.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& a);
  explicit SpdMatrix(const SymMatrix& a);

  static SpdMatrix identity(Eigen::Index n);
  // Builds Q diag(values) Qᵀ; values must pass the PD floor.
  static SpdMatrix from_eig(const Vector& values, const Matrix& vectors);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  const EigPair& eig() const { return eig_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix as_sym() const;
  SpdMatrix sqrt() const;
  SpdMatrix invsqrt() const;
  SpdMatrix inv() const;
  SpdMatrix pow(double p) const;
  Matrix log() const;  // symmetric matrix logarithm

  double min_eigenvalue() const { return eig_.values(eig_.values.size() - 1); }
  double max_eigenvalue() const { return eig_.values(0); }
  double condition_number() const { return max_eigenvalue() / min_eigenvalue(); }
  double trace() const { return m_.trace(); }
  double logdet() const;

 private:
  SpdMatrix(Matrix m, EigPair eig) : m_(std::move(m)), eig_(std::move(eig)) {}
  Matrix m_;
  EigPair eig_;
};

/// True if `a` (symmetric) passes the relative PD floor.
bool is_positive_definite(const Matrix& a, double floor = kPdFloor);

SpdMatrix spd_sqrt(const SpdMatrix& x);
SpdMatrix spd_invsqrt(const SpdMatrix& x);
SpdMatrix spd_inv(const SpdMatrix& x);

/// Affine-invariant geometric mean A # B = A^{1/2}(A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.
SpdMatrix geometric_mean(const SpdMatrix& a, const SpdMatrix& b);

/// Principal square root of the (non-symmetric) product A·B of two SPD
/// matrices, via the similarity A^{1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}.
Matrix sqrt_of_product(const SpdMatrix& a, const SpdMatrix& b);

/// Orthogonal polar factor O of a = O·P (P SPD), computed as U Vᵀ from a full
/// SVD. Throws SingularInputError if σ_min ≤ floor · σ_max.
Matrix polar_factor(const Matrix& a, double floor = kPdFloor);

/// λ_min(b − a); a ⪯ b iff the result is ≥ −tolerance.
double loewner_gap(const SymMatrix& a, const SymMatrix& b);

/// The matrix M parameterizing the geometry, with its derived powers cached.
class GbwParam {
 public:
  explicit GbwParam(const SpdMatrix& m);
  static GbwParam identity(Eigen::Index n);

  const SpdMatrix& m() const { return m_; }
  const SpdMatrix& m_sqrt() const { return m_sqrt_; }
  const SpdMatrix& m_invsqrt() const { return m_invsqrt_; }
  const SpdMatrix& m_inv() const { return m_inv_; }
  Eigen::Index dim() const { return m_.dim(); }

 private:
  SpdMatrix m_;
  SpdMatrix m_sqrt_;
  SpdMatrix m_invsqrt_;
  SpdMatrix m_inv_;
};

}  // namespace gbw
