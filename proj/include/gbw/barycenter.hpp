#pragma once

// Weighted GBW barycenter by the fixed-point map
//   K(A) = M A^{-1/2} (Σ w_l (A^{1/2} M⁻¹ X_l M⁻¹ A^{1/2})^{1/2})² A^{-1/2} M.

#include <json.hpp>
#include <optional>
#include <vector>

#include "gbw/geometry.hpp"

namespace gbw {

class BarycenterProblem {
 public:
  BarycenterProblem(std::vector<SpdMatrix> points, Vector weights, GbwManifold manifold);
  // equal weights
  BarycenterProblem(std::vector<SpdMatrix> points, GbwManifold manifold);

  const std::vector<SpdMatrix>& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  const GbwManifold& manifold() const { return manifold_; }

  /// Σ w_l d²(A, X_l)
  double objective(const SpdMatrix& a) const;
  SpdMatrix fixed_point_map(const SpdMatrix& a) const;
  /// A^{1/2}M⁻¹A^{1/2} − Σ w_l (A^{1/2}M⁻¹X_lM⁻¹A^{1/2})^{1/2}
  Matrix optimality_residual(const SpdMatrix& a) const;
  /// Σ w_l X_l
  SpdMatrix euclidean_mean() const;

 private:
  std::vector<SpdMatrix> points_;
  Vector weights_;
  GbwManifold manifold_;
};

struct BarycenterOptions {
  double tol = 1e-12;  // relative Frobenius change
  int max_iters = 1000;
  std::optional<SpdMatrix> init;
};

struct BarycenterResult {
  SpdMatrix point;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective;  // F(A_0), F(A_1), ...
  std::vector<double> change;     // relative change of each step
  double residual = 0.0;          // ‖optimality residual‖_F

  nlohmann::json to_json() const;
};

BarycenterResult barycenter(const BarycenterProblem& prob, const BarycenterOptions& opts = {});

}  // namespace gbw
