#pragma once

// Optimal transport between zero-mean Gaussians under the Mahalanobis cost
// ‖x − y‖²_{M⁻¹}, and the robust distance over M⁻¹ ∈ {0 ⪯ S ⪯ I}.

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <vector>

#include "gbw/geometry.hpp"

namespace gbw {

struct GaussianMeasure {
  SpdMatrix cov;
};

/// tr((X^{1/2}M⁻¹YM⁻¹X^{1/2})^{1/2})
double f_tilde(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y);

/// ½ tr(XA + M⁻¹YM⁻¹A⁻¹)
double f_tilde_additive(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y,
                        const SpdMatrix& a);
/// √(tr(XA) tr(M⁻¹YM⁻¹A⁻¹))
double f_tilde_product(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y,
                       const SpdMatrix& a);
/// The common minimizer of both forms, X⁻¹ # (M⁻¹YM⁻¹).
SpdMatrix f_tilde_minimizer(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y);

/// Squared generalized Wasserstein distance between N(0, X) and N(0, Y).
double gaussian_w2(const GaussianMeasure& mu, const GaussianMeasure& nu, const GbwParam& m);

/// T = M (X⁻¹ # (M⁻¹YM⁻¹)); the linear map pushing N(0, X) onto N(0, Y).
Matrix transport_plan(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m);

/// tr(M⁻¹X) + tr(M⁻¹Y) − 2 tr(M⁻¹TX)
double transport_cost(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m, const Matrix& t);

/// Sample mean of ‖x − Tx‖²_{M⁻¹} for x ~ N(0, X). Samples are drawn in
/// fixed-size chunks, each from its own seeded stream, so the result does not
/// depend on how chunks are scheduled.
double monte_carlo_transport_cost(const SpdMatrix& x, const Matrix& t, const GbwParam& m,
                                  std::int64_t samples, std::uint64_t seed, bool parallel = true);

// ---- robust distance

enum class RobustSetKind { unit_interval };

/// C = {S : 0 ⪯ S ⪯ I}; projection clamps eigenvalues to [floor, 1].
struct RobustConstraintSet {
  RobustSetKind kind = RobustSetKind::unit_interval;
  double floor = kPdFloor;

  SymMatrix project(const SymMatrix& s) const;
  bool contains(const SymMatrix& s, double tol = 1e-12) const;
};

struct RobustAscentConfig {
  double step = 1e-2;
  int max_iters = 500;
  int max_halvings = 60;
  double stationarity_tol = 1e-12;  // ‖S_{k+1} − S_k‖_F that counts as converged
  std::optional<SymMatrix> init;     // projected onto the set; default S_0 = I
};

struct RobustResult {
  double value = 0.0;  // best d² found
  SymMatrix s;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // objective per iteration, starting at S_0

  nlohmann::json to_json() const;
};

/// tr(SX) + tr(SY) − 2 tr((X^{1/2}SYSX^{1/2})^{1/2}); d² under M⁻¹ = S for PSD S.
double robust_objective(const SpdMatrix& x, const SpdMatrix& y, const SymMatrix& s);
/// Euclidean gradient in S: X + Y − 2 sym(Y^{1/2} O X^{1/2}), where O is the
/// polar factor of Y^{1/2} S X^{1/2}; equal to X + Y − 2 sym(YSX^{1/2}Z^{-1/2}X^{1/2}).
SymMatrix robust_gradient(const SpdMatrix& x, const SpdMatrix& y, const SymMatrix& s);

RobustResult robust_distance(const SpdMatrix& x, const SpdMatrix& y,
                             const RobustConstraintSet& c = {}, const RobustAscentConfig& cfg = {});

}  // namespace gbw
