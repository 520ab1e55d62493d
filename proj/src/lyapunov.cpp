#include "gbw/lyapunov.hpp"

#include <sstream>

namespace gbw {

GenLyapunov::GenLyapunov(const SpdMatrix& x, const GbwParam& m, double floor) {
  require_same_dim(x.dim(), m.dim(), "GenLyapunov");
  init(x, m.m_invsqrt(), floor);
}

GenLyapunov::GenLyapunov(const SpdMatrix& x, const SpdMatrix& m, double floor) {
  require_same_dim(x.dim(), m.dim(), "GenLyapunov");
  init(x, m.invsqrt(), floor);
}

void GenLyapunov::init(const SpdMatrix& x, const SpdMatrix& m_invsqrt, double floor) {
  const Matrix& mi = m_invsqrt.matrix();
  EigPair e = sym_eig(sym_part(mi * x.matrix() * mi));
  const Eigen::Index n = x.dim();
  double lmax = e.values(0);
  double lmin = e.values(n - 1);
  if (!(lmax > 0.0) || !(2.0 * lmin > floor * 2.0 * lmax)) {
    std::ostringstream os;
    os << "generalized Lyapunov operator is numerically singular (lambda_min = " << lmin
       << ", lambda_max = " << lmax << ")";
    throw SingularOperatorError(os.str());
  }
  w_ = mi * e.vectors;
  denom_ = e.values.replicate(1, n) + e.values.transpose().replicate(n, 1);
}

Matrix GenLyapunov::solve_general(const Matrix& u) const {
  require_square(u, "GenLyapunov::solve");
  require_same_dim(u.rows(), dim(), "GenLyapunov::solve");
  Matrix ut = w_.transpose() * u * w_;
  Matrix lt = ut.cwiseQuotient(denom_);
  return w_ * lt * w_.transpose();
}

SymMatrix GenLyapunov::solve(const SymMatrix& u) const {
  return SymMatrix::symmetric_part(solve_general(u.matrix()));
}

SymMatrix solve_gen_lyapunov(const SpdMatrix& x, const GbwParam& m, const SymMatrix& u,
                             double floor) {
  return GenLyapunov(x, m, floor).solve(u);
}

SymMatrix solve_gen_lyapunov(const SpdMatrix& x, const SpdMatrix& m, const SymMatrix& u,
                             double floor) {
  return GenLyapunov(x, m, floor).solve(u);
}

}  // namespace gbw
