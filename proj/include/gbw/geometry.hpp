#pragma once

// The generalized Bures-Wasserstein manifold for a fixed M: metric, distance,
// geodesics, exp/log, the GL(n) quotient picture, connection and curvature.

#include <json.hpp>

#include "gbw/lyapunov.hpp"
#include "gbw/spd.hpp"

namespace gbw {

/// Tolerance on a negative distance radicand that is treated as roundoff.
inline constexpr double kRadicandSlack = 1e-10;

class GeodesicSegment {
 public:
  GeodesicSegment(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m);

  const SpdMatrix& start() const { return x_; }
  const SpdMatrix& end() const { return y_; }
  const Matrix& polar() const { return o_; }
  // K = Y # (M X⁻¹ M)
  const SpdMatrix& k() const { return k_; }

  /// ψψᵀ with ψ = (1−t)X^{1/2} + tY^{1/2}O. Throws OutOfConeError when the
  /// result is not PD (only possible for t outside [0, 1]).
  SpdMatrix eval(double t) const;
  /// (1−t)²X + t²Y + t(1−t)[K M⁻¹X + X M⁻¹K], without the PD check.
  Matrix eval_polynomial(double t) const;
  /// First and second derivatives of the curve in t.
  Matrix velocity(double t) const;
  Matrix acceleration(double t) const;

  nlohmann::json to_json(int grid_points) const;

 private:
  SpdMatrix x_;
  SpdMatrix y_;
  GbwParam m_;
  Matrix x_sqrt_;
  Matrix ysqrt_o_;
  Matrix o_;
  SpdMatrix k_;
};

struct ProcrustesResult {
  double value;  // min_O ‖X^{1/2} − Y^{1/2}O‖_{M⁻¹}
  Matrix rotation;
};

/// The polar factor of Y^{1/2}M⁻¹X^{1/2} evaluated four ways.
struct PolarForms {
  Matrix svd;      // U Vᵀ of the SVD
  Matrix inverse;  // Y^{1/2}M⁻¹X^{1/2}(X^{1/2}M⁻¹YM⁻¹X^{1/2})^{-1/2}
  Matrix product;  // Y^{1/2}(Y⁻¹MX⁻¹M)^{1/2}M⁻¹X^{1/2}
  Matrix mean;     // Y^{-1/2}(Y#(MX⁻¹M))M⁻¹X^{1/2}
};

struct FiberSplit {
  Matrix horizontal;
  Matrix vertical;
  SymMatrix s;  // horizontal = M^{1/2} S M^{1/2} P
  Matrix k;     // vertical = M^{-1/2} K M^{-1/2} P^{-T}, K skew
};

struct CurvatureBounds {
  double k_min = 0.0;
  double k_max = 0.0;
  // Symmetric generators of the extremal plane; lifts are M^{1/2}S M^{1/2}P.
  SymMatrix s_u;
  SymMatrix s_v;
};

class GbwManifold {
 public:
  explicit GbwManifold(const GbwParam& m);
  explicit GbwManifold(const SpdMatrix& m);
  static GbwManifold bures_wasserstein(Eigen::Index n);

  const GbwParam& param() const { return m_; }
  Eigen::Index dim() const { return m_.dim(); }

  GenLyapunov lyapunov(const SpdMatrix& x) const { return GenLyapunov(x, m_); }

  double inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const;
  double norm(const SpdMatrix& x, const SymMatrix& u) const;

  double distance_squared(const SpdMatrix& x, const SpdMatrix& y) const;
  double distance(const SpdMatrix& x, const SpdMatrix& y) const;
  // tr((X^{1/2}M⁻¹YM⁻¹X^{1/2})^{1/2})
  double fidelity(const SpdMatrix& x, const SpdMatrix& y) const;

  ProcrustesResult procrustes(const SpdMatrix& x, const SpdMatrix& y) const;
  Matrix polar(const SpdMatrix& x, const SpdMatrix& y) const;
  PolarForms polar_forms(const SpdMatrix& x, const SpdMatrix& y) const;

  GeodesicSegment geodesic(const SpdMatrix& x, const SpdMatrix& y) const;

  /// X + U + M L X L M with L = L_{X,M}[U]. Throws InjectivityDomainError
  /// unless M + M L M ≻ 0.
  SpdMatrix exp(const SpdMatrix& x, const SymMatrix& u) const;
  bool exp_in_domain(const SpdMatrix& x, const SymMatrix& u) const;
  SymMatrix log(const SpdMatrix& x, const SpdMatrix& y) const;

  /// |d²(X, X+θH) − (θ²/2) tr(L[H]H)| / θ²
  double second_order_check(const SpdMatrix& x, const SymMatrix& h, double theta) const;

  /// ∇_ξ η given the Euclidean derivative D_ξ η of the field η.
  SymMatrix levi_civita(const SpdMatrix& x, const SymMatrix& xi, const SymMatrix& eta,
                        const SymMatrix& d_xi_eta) const;

  // ---- quotient GL(n) → SPD, π(P) = M^{1/2} P Pᵀ M^{1/2}
  SpdMatrix project_fiber(const Matrix& p) const;
  /// A representative with π(P) = X: P = M^{-1/2} X^{1/2}.
  Matrix fiber_point(const SpdMatrix& x) const;
  /// Horizontal lift at P of the tangent vector U at π(P).
  Matrix horizontal_lift(const Matrix& p, const SymMatrix& u) const;
  FiberSplit split(const Matrix& p, const Matrix& u) const;
  Matrix horizontal_project(const Matrix& p, const Matrix& u) const;
  Matrix vertical_project(const Matrix& p, const Matrix& u) const;

  /// Sectional curvature of the plane spanned by two horizontal vectors at P,
  /// normalized by ‖Ũ‖²‖Ṽ‖² − ⟨Ũ,Ṽ⟩². Throws PreconditionError for
  /// non-horizontal input (relative vertical part above 1e-8) or a degenerate plane.
  double sectional_curvature(const Matrix& p, const Matrix& u_tilde, const Matrix& v_tilde) const;
  CurvatureBounds curvature_bounds(const Matrix& p) const;

  /// λ_min((1−t)X + tY − γ(t)).
  double interpolate_inequality(const SpdMatrix& x, const SpdMatrix& y, double t) const;

 private:
  GbwParam m_;
};

}  // namespace gbw
