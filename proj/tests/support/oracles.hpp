#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solvers.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Vec vec(const Mat& a) { return Eigen::Map<const Vec>(a.data(), a.size()); }
inline Mat unvec(const Vec& v, Eigen::Index n) { return Eigen::Map<const Mat>(v.data(), n, n); }

// Solve X L M + M L X = U through the n²×n² system (M⊗X + X⊗M) vec(L) = vec(U).
inline Mat kron_lyapunov(const Mat& x, const Mat& m, const Mat& u) {
  Mat k = Eigen::kroneckerProduct(m, x).eval() + Eigen::kroneckerProduct(x, m).eval();
  Vec l = k.llt().solve(vec(u));
  return unvec(l, x.rows());
}

// ½ vec(U)ᵀ (X⊗M + M⊗X)⁻¹ vec(V)
inline double kron_inner(const Mat& x, const Mat& m, const Mat& u, const Mat& v) {
  Mat k = Eigen::kroneckerProduct(x, m).eval() + Eigen::kroneckerProduct(m, x).eval();
  return 0.5 * vec(u).dot(k.llt().solve(vec(v)));
}

// Principal square root through Eigen's Schur-based matrix function.
inline Mat schur_sqrt(const Mat& a) { return a.sqrt(); }

inline Mat sym_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

inline Mat sym_inv_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// d²_bw via a Schur square root of the product X Y: tr X + tr Y − 2 tr (XY)^{1/2}.
inline double bw_distance_sq(const Mat& x, const Mat& y) {
  Mat r = (x * y).sqrt();
  return x.trace() + y.trace() - 2.0 * r.trace();
}

inline Mat rotation(double th) {
  Mat r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return r;
}

// Central difference of a scalar function along direction h.
inline double central_diff(const std::function<double(double)>& f, double eps) {
  return (f(eps) - f(-eps)) / (2.0 * eps);
}

// Five-point central difference; error O(eps⁴).
inline double central_diff5(const std::function<double(double)>& f, double eps) {
  return (-f(2 * eps) + 8 * f(eps) - 8 * f(-eps) + f(-2 * eps)) / (12.0 * eps);
}

inline Mat central_diff5_mat(const std::function<Mat(double)>& f, double eps) {
  return (-f(2 * eps) + 8 * f(eps) - 8 * f(-eps) + f(-2 * eps)) / (12.0 * eps);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

inline double rel_err(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max({1e-300, a.norm(), b.norm()});
}

}  // namespace oracle
