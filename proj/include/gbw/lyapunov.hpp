#pragma once

// Generalized Lyapunov operator: the symmetric L with X·L·M + M·L·X = U.

#include "gbw/spd.hpp"

namespace gbw {

/// Pre-factored operator for a fixed pair (X, M). Solves by congruence: with
/// A = M^{-1/2} X M^{-1/2} = Q Λ Qᵀ and W = M^{-1/2} Q, the solution is
/// L = W [ (Wᵀ U W)_ij / (λ_i + λ_j) ] Wᵀ.
class GenLyapunov {
 public:
  // `floor` is relative: the smallest pair sum must exceed floor · (2 λ_max).
  GenLyapunov(const SpdMatrix& x, const GbwParam& m, double floor = kPdFloor);
  GenLyapunov(const SpdMatrix& x, const SpdMatrix& m, double floor = kPdFloor);

  SymMatrix solve(const SymMatrix& u) const;
  // Any square right-hand side; the solution of the same linear equation
  // (a skew rhs gives a skew solution).
  Matrix solve_general(const Matrix& u) const;

  Eigen::Index dim() const { return w_.rows(); }

 private:
  void init(const SpdMatrix& x, const SpdMatrix& m_invsqrt, double floor);
  Matrix w_;       // M^{-1/2} Q
  Matrix denom_;   // λ_i + λ_j
};

SymMatrix solve_gen_lyapunov(const SpdMatrix& x, const GbwParam& m, const SymMatrix& u,
                             double floor = kPdFloor);
SymMatrix solve_gen_lyapunov(const SpdMatrix& x, const SpdMatrix& m, const SymMatrix& u,
                             double floor = kPdFloor);

}  // namespace gbw
