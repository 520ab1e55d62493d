#pragma once

// Riemannian trust region, Riemannian SGD and Stiefel gradient ascent.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbw/manifold.hpp"

namespace gbw {

struct TraceRow {
  int iter = 0;
  long cumulative_inner_iters = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  double dist_to_ref = NAN;  // NaN when no reference is supplied
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  std::uint64_t seed = 0;
  bool converged = false;
  bool aborted = false;
  std::string message;

  static const char* csv_header();  // iter,cumulative_inner_iters,cost,grad_norm,step,dist_to_ref
  std::string to_csv() const;
};

struct TrustRegionConfig {
  double gtol = 1e-10;     // stop when the Riemannian gradient norm falls below
  int max_outer = 1000;
  int max_inner = 0;       // 0: manifold dimension n(n+1)/2
  double kappa = 0.1;      // tCG linear convergence target
  double theta = 1.0;      // tCG superlinear exponent
  double rho_accept = 0.1;
  std::optional<double> delta0;  // default ‖x0‖_F / 8
  double delta_max_factor = 8.0;
  int adaptive_cadence = 1;      // refresh M = X every this many outer iterations
  std::optional<SpdMatrix> reference;  // for the dist_to_ref column (spectral norm)
};

struct TrustRegionResult {
  SpdMatrix point;
  SolveTrace trace;
};

TrustRegionResult trust_region(const SpdGeometry& geom, const Objective& obj, const SpdMatrix& x0,
                               const TrustRegionConfig& cfg = {});

/// Trust region over a geometry kind; gbw_adaptive honours cfg.adaptive_cadence
/// by freezing M at the iterate where it was last refreshed.
TrustRegionResult trust_region(GeometryKind kind, const Objective& obj, const SpdMatrix& x0,
                               const TrustRegionConfig& cfg = {});

// ---- stochastic

/// Point of a product manifold: SPD blocks plus one Euclidean vector block.
struct ProductPoint {
  std::vector<SpdMatrix> spd;
  Vector euclid;
};

struct ProductGrad {
  std::vector<SymMatrix> spd;
  Vector euclid;
};

struct StochasticObjective {
  std::size_t num_samples = 0;
  /// Mean loss over `batch` and its Euclidean gradients.
  std::function<double(const ProductPoint&, std::span<const std::size_t> batch, ProductGrad&)> batch;
  /// Full-data mean loss and gradients, evaluated at epoch boundaries for the trace.
  std::function<double(const ProductPoint&, ProductGrad&)> full;
};

struct RsgdConfig {
  double step0 = 1e-2;
  double decay = 1e-3;  // α_t = α₀ / (1 + α₀ λ t)
  std::size_t batch = 50;
  int epochs = 50;
  std::uint64_t seed = 0;
  int max_halvings = 40;
};

struct RsgdResult {
  ProductPoint point;
  SolveTrace trace;  // one row per epoch; grad_norm holds sqrt(Σ_j ‖Σ_j G_j‖²)
};

/// `kind` selects the geometry of every SPD block; the Euclidean block takes
/// plain SGD steps.
RsgdResult rsgd(GeometryKind kind, const StochasticObjective& obj, const ProductPoint& x0,
                const RsgdConfig& cfg, const std::optional<GbwParam>& m = std::nullopt);

/// sqrt(Σ_j ‖Σ_j G_j‖_F²) over the SPD blocks.
double euclidean_grad_proxy(const ProductPoint& x, const ProductGrad& g);

// ---- Stiefel

struct StiefelConfig {
  int max_iters = 500;
  double step0 = 1.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  double gtol = 1e-9;
  bool maximize = true;
};

struct StiefelResult {
  Matrix w;
  std::vector<double> objective;  // value after each accepted iteration, starting at W0
  std::vector<double> grad_norm;
  bool converged = false;
};

/// Gradient ascent (or descent) with Armijo backtracking on the Stiefel manifold.
StiefelResult stiefel_optimize(const Stiefel& st, const std::function<double(const Matrix&)>& f,
                               const std::function<Matrix(const Matrix&)>& egrad,
                               const Matrix& w0, const StiefelConfig& cfg = {});

/// Euclidean gradient descent with Armijo backtracking on an unconstrained matrix.
struct DescentConfig {
  int max_iters = 200;
  double step0 = 1.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  double gtol = 1e-9;
};

struct DescentResult {
  Matrix w;
  std::vector<double> objective;
  std::vector<double> grad_norm;
  bool converged = false;
};

DescentResult gradient_descent(const std::function<double(const Matrix&)>& f,
                               const std::function<Matrix(const Matrix&)>& egrad, const Matrix& w0,
                               const DescentConfig& cfg = {});

}  // namespace gbw
