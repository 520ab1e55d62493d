#pragma once

// Optimization-facing view of the SPD manifold under different metrics, plus
// the Stiefel manifold used by PCA.

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gbw/geometry.hpp"

namespace gbw {

enum class GeometryKind { gbw, gbw_adaptive, bw, affine_invariant };

std::string geometry_name(GeometryKind k);
/// Accepts ai, affine_invariant, bw, gbw (adaptive), gbw_adaptive, gbw_fixed.
GeometryKind parse_geometry(const std::string& s);

class SpdGeometry {
 public:
  virtual ~SpdGeometry() = default;
  virtual GeometryKind kind() const = 0;
  std::string name() const { return geometry_name(kind()); }

  virtual double inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const = 0;
  virtual SymMatrix rgrad(const SpdMatrix& x, const SymMatrix& egrad) const = 0;
  virtual SymMatrix rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                          const SymMatrix& u) const = 0;
  /// Exact exponential map; throws InjectivityDomainError outside its domain.
  virtual SpdMatrix exp(const SpdMatrix& x, const SymMatrix& u) const = 0;

  double norm(const SpdMatrix& x, const SymMatrix& u) const;
};

/// GBW with a fixed M (BW when M = I).
class GbwGeometry : public SpdGeometry {
 public:
  explicit GbwGeometry(const GbwParam& m, bool is_bw = false);
  static std::unique_ptr<GbwGeometry> bures_wasserstein(Eigen::Index n);

  GeometryKind kind() const override { return bw_ ? GeometryKind::bw : GeometryKind::gbw; }
  const GbwManifold& manifold() const { return man_; }

  double inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const override;
  /// 2X∇fM + 2M∇fX
  SymMatrix rgrad(const SpdMatrix& x, const SymMatrix& egrad) const override;
  /// 4{M∇²f[U]X}_S + 2{M∇fU}_S + 4{X{∇fML[U]}_S M}_S − {ML[U]grad}_S
  SymMatrix rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                  const SymMatrix& u) const override;
  SpdMatrix exp(const SpdMatrix& x, const SymMatrix& u) const override;

 private:
  GbwManifold man_;
  bool bw_;
};

/// GBW with M set to the point itself: every call uses M = x.
class AdaptiveGbwGeometry : public SpdGeometry {
 public:
  GeometryKind kind() const override { return GeometryKind::gbw_adaptive; }
  /// ¼ tr(X⁻¹UX⁻¹V)
  double inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const override;
  /// 4X∇fX
  SymMatrix rgrad(const SpdMatrix& x, const SymMatrix& egrad) const override;
  SymMatrix rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                  const SymMatrix& u) const override;
  /// X + U + ¼UX⁻¹U, defined while X + ½U ≻ 0
  SpdMatrix exp(const SpdMatrix& x, const SymMatrix& u) const override;
};

/// Affine-invariant metric tr(X⁻¹UX⁻¹V).
class AiGeometry : public SpdGeometry {
 public:
  GeometryKind kind() const override { return GeometryKind::affine_invariant; }
  double inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const override;
  /// X∇fX
  SymMatrix rgrad(const SpdMatrix& x, const SymMatrix& egrad) const override;
  /// X∇²f[U]X + {U∇fX}_S
  SymMatrix rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                  const SymMatrix& u) const override;
  /// X^{1/2} exp(X^{-1/2}UX^{-1/2}) X^{1/2}
  SpdMatrix exp(const SpdMatrix& x, const SymMatrix& u) const override;
};

/// `m` is used only for GeometryKind::gbw; bw uses the identity.
std::unique_ptr<SpdGeometry> make_geometry(GeometryKind kind, Eigen::Index n,
                                           const std::optional<GbwParam>& m = std::nullopt);

/// Smooth objective on SPD matrices with Euclidean derivatives.
struct Objective {
  std::function<double(const SpdMatrix&)> cost;
  std::function<SymMatrix(const SpdMatrix&)> egrad;
  // ∇²f(X)[U]; optional
  std::function<SymMatrix(const SpdMatrix&, const SymMatrix&)> ehess;
};

/// The n(n+1)/2 matrices E_ii and (E_ij + E_ji)/√2.
std::vector<SymMatrix> symmetric_basis(Eigen::Index n);

// ---- Stiefel manifold {W ∈ R^{n×d} : WᵀW = I}

class Stiefel {
 public:
  Stiefel(Eigen::Index n, Eigen::Index d);
  Eigen::Index n() const { return n_; }
  Eigen::Index d() const { return d_; }

  /// U − W sym(WᵀU)
  Matrix project_tangent(const Matrix& w, const Matrix& u) const;
  /// Polar factor of W + U (thin SVD). Throws SingularInputError on rank loss.
  Matrix retract(const Matrix& w, const Matrix& u) const;
  /// Riemannian gradient for the embedded metric: the tangent projection.
  Matrix rgrad(const Matrix& w, const Matrix& egrad) const { return project_tangent(w, egrad); }
  Matrix random_point(std::uint64_t seed) const;
  bool contains(const Matrix& w, double tol = 1e-8) const;

 private:
  Eigen::Index n_, d_;
};

}  // namespace gbw
