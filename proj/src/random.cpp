#include "gbw/random.hpp"

#include <Eigen/QR>
#include <cmath>

namespace gbw {

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix a(rows, cols);
  // fill row by row so the layout of draws does not depend on storage order
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = nd(rng);
  return a;
}

Vector gaussian_vector(Rng& rng, Eigen::Index n) { return gaussian_matrix(rng, n, 1).col(0); }

Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  Matrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  return ud(rng);
}

SpdMatrix random_spd(Rng& rng, Eigen::Index n, double lo, double hi) {
  Matrix q = random_orthogonal(rng, n);
  Vector lam(n);
  double a = std::log(lo), b = std::log(hi);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::exp(uniform(rng, a, b));
  return SpdMatrix::from_eig(lam, q);
}

SymMatrix random_sym(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) a(i, j) = a(j, i) = nd(rng);
  return SymMatrix(a);
}

Matrix random_skew(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      a(i, j) = nd(rng);
      a(j, i) = -a(i, j);
    }
  return a;
}

}  // namespace gbw
