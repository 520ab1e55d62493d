#include "gbw/spd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace gbw {

Matrix sym_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double relative_asymmetry(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw DimensionError(os.str());
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& a) {
  require_square(a, "SymMatrix");
  if (!a.allFinite()) throw DegenerateInputError("SymMatrix: non-finite entries");
  double asym = relative_asymmetry(a);
  if (asym > kSymmetryRejectTol) {
    std::ostringstream os;
    os << "SymMatrix: input not symmetric (relative asymmetry " << asym << ")";
    throw NotSymmetricError(os.str());
  }
  m_ = sym_part(a);
}

SymMatrix SymMatrix::symmetric_part(const Matrix& a) {
  require_square(a, "SymMatrix::symmetric_part");
  return SymMatrix(sym_part(a), Trusted{});
}

SymMatrix SymMatrix::zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n), Trusted{}); }
SymMatrix SymMatrix::identity(Eigen::Index n) {
  return SymMatrix(Matrix::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  require_same_dim(dim(), o.dim(), "SymMatrix +");
  return SymMatrix(m_ + o.m_, Trusted{});
}
SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  require_same_dim(dim(), o.dim(), "SymMatrix -");
  return SymMatrix(m_ - o.m_, Trusted{});
}
SymMatrix SymMatrix::operator-() const { return SymMatrix(-m_, Trusted{}); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(s * m_, Trusted{}); }

// ------------------------------------------------------------------ eigen

Matrix EigPair::reconstruct(const std::function<double(double)>& f) const {
  Vector fv = values.unaryExpr(f);
  return sym_part(vectors * fv.asDiagonal() * vectors.transpose());
}

EigPair sym_eig(const Matrix& symmetric) {
  require_square(symmetric, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  if (es.info() != Eigen::Success) throw ComputationError("sym_eig: eigensolver did not converge");
  // Eigen returns ascending order; flip to descending.
  EigPair out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

EigPair sym_eig(const SymMatrix& a) { return sym_eig(a.matrix()); }

// ---------------------------------------------------------------- SpdMatrix

namespace {

void check_pd_spectrum(const Vector& values, const char* what) {
  if (!values.allFinite()) throw DegenerateInputError(std::string(what) + ": non-finite spectrum");
  double hi = values.maxCoeff();
  double lo = values.minCoeff();
  if (!(hi > 0.0) || !(lo > kPdFloor * hi)) {
    std::ostringstream os;
    os << what << ": not positive definite (lambda_min = " << lo << ", lambda_max = " << hi << ")";
    throw DegenerateInputError(os.str());
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& a) : SpdMatrix(SymMatrix(a)) {}

SpdMatrix::SpdMatrix(const SymMatrix& a) {
  if (a.dim() == 0) throw DimensionError("SpdMatrix: empty matrix");
  m_ = a.matrix();
  eig_ = sym_eig(m_);
  check_pd_spectrum(eig_.values, "SpdMatrix");
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  EigPair e{Vector::Ones(n), Matrix::Identity(n, n)};
  return SpdMatrix(Matrix::Identity(n, n), std::move(e));
}

SpdMatrix SpdMatrix::from_eig(const Vector& values, const Matrix& vectors) {
  require_square(vectors, "SpdMatrix::from_eig");
  require_same_dim(values.size(), vectors.rows(), "SpdMatrix::from_eig");
  check_pd_spectrum(values, "SpdMatrix::from_eig");
  // keep the descending convention
  std::vector<Eigen::Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return values(i) > values(j); });
  EigPair e;
  e.values.resize(values.size());
  e.vectors.resize(vectors.rows(), vectors.cols());
  for (size_t k = 0; k < idx.size(); ++k) {
    e.values(k) = values(idx[k]);
    e.vectors.col(k) = vectors.col(idx[k]);
  }
  Matrix m = sym_part(e.vectors * e.values.asDiagonal() * e.vectors.transpose());
  return SpdMatrix(std::move(m), std::move(e));
}

SymMatrix SpdMatrix::as_sym() const { return SymMatrix::symmetric_part(m_); }

SpdMatrix SpdMatrix::pow(double p) const {
  Vector v = eig_.values.array().pow(p).matrix();
  return from_eig(v, eig_.vectors);
}

SpdMatrix SpdMatrix::sqrt() const { return pow(0.5); }
SpdMatrix SpdMatrix::invsqrt() const { return pow(-0.5); }
SpdMatrix SpdMatrix::inv() const { return pow(-1.0); }

Matrix SpdMatrix::log() const {
  return eig_.reconstruct([](double v) { return std::log(v); });
}

double SpdMatrix::logdet() const { return eig_.values.array().log().sum(); }

bool is_positive_definite(const Matrix& a, double floor) {
  if (a.rows() != a.cols() || a.rows() == 0 || !a.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  double lo = es.eigenvalues()(0);
  double hi = es.eigenvalues()(a.rows() - 1);
  return hi > 0.0 && lo > floor * hi;
}

SpdMatrix spd_sqrt(const SpdMatrix& x) { return x.sqrt(); }
SpdMatrix spd_invsqrt(const SpdMatrix& x) { return x.invsqrt(); }
SpdMatrix spd_inv(const SpdMatrix& x) { return x.inv(); }

SpdMatrix geometric_mean(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "geometric_mean");
  SpdMatrix ah = a.sqrt();
  SpdMatrix aih = a.invsqrt();
  SpdMatrix inner(sym_part(aih.matrix() * b.matrix() * aih.matrix()));
  SpdMatrix r = inner.sqrt();
  return SpdMatrix(sym_part(ah.matrix() * r.matrix() * ah.matrix()));
}

Matrix sqrt_of_product(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "sqrt_of_product");
  SpdMatrix ah = a.sqrt();
  SpdMatrix aih = a.invsqrt();
  SpdMatrix inner(sym_part(ah.matrix() * b.matrix() * ah.matrix()));
  return ah.matrix() * inner.sqrt().matrix() * aih.matrix();
}

Matrix polar_factor(const Matrix& a, double floor) {
  require_square(a, "polar_factor");
  if (!a.allFinite()) throw SingularInputError("polar_factor: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(s.size() - 1) <= floor * s(0)) {
    std::ostringstream os;
    os << "polar_factor: rank-deficient input (sigma_min = " << s(s.size() - 1)
       << ", sigma_max = " << s(0) << ")";
    throw SingularInputError(os.str());
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

double loewner_gap(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "loewner_gap");
  Eigen::SelfAdjointEigenSolver<Matrix> es(b.matrix() - a.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ComputationError("loewner_gap: eigensolver failed");
  return es.eigenvalues()(0);
}

// ---------------------------------------------------------------- GbwParam

GbwParam::GbwParam(const SpdMatrix& m)
    : m_(m), m_sqrt_(m.sqrt()), m_invsqrt_(m.invsqrt()), m_inv_(m.inv()) {}

GbwParam GbwParam::identity(Eigen::Index n) { return GbwParam(SpdMatrix::identity(n)); }

}  // namespace gbw
