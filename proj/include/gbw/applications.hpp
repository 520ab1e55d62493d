#pragma once

// Concrete problems on top of the solver layer: log-det optimization,
// Gaussian mixtures, geometry-aware PCA, metric learning, and the geodesic
// convexity checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gbw/barycenter.hpp"
#include "gbw/solvers.hpp"

namespace gbw {

// ------------------------------------------------------------------ log-det

/// f(X) = −logdet X + tr(CX); ∇f = C − X⁻¹; ∇²f[U] = X⁻¹UX⁻¹. Minimized at C⁻¹.
Objective logdet_objective(const SpdMatrix& c);

/// Q diag(λ) Qᵀ with λ log-spaced over [1/√cond, √cond] and Q from the QR
/// factorization of a seeded Gaussian matrix.
SpdMatrix conditioned_spd(Eigen::Index n, double cond, std::uint64_t seed);

struct LogDetProblem {
  SpdMatrix c;
  SpdMatrix x_star;  // C⁻¹

  static LogDetProblem synthetic(Eigen::Index n, double cond, std::uint64_t seed);
  Objective objective() const { return logdet_objective(c); }
};

// --------------------------------------------------------------------- GMM

/// (2π)^{1−d/2} det(Σ)^{1/2} exp(½ − ½xᵀΣx), d = dim(x)
double gmm_density(const Vector& x, const SpdMatrix& sigma);
double gmm_log_density(const Vector& x, const SpdMatrix& sigma);

Vector softmax(const Vector& logits);

struct GmmModel {
  std::vector<SpdMatrix> sigmas;
  Vector logits;

  std::size_t k() const { return sigmas.size(); }
  Vector weights() const { return softmax(logits); }
  ProductPoint as_point() const { return {sigmas, logits}; }
  static GmmModel from_point(const ProductPoint& p) { return {p.spd, p.euclid}; }
};

/// Data rows are samples. The objective is the mean negative log-likelihood,
/// with gradients in each Σ_j and in the logits.
class GmmObjective {
 public:
  GmmObjective(Matrix data, std::size_t k);

  std::size_t k() const { return k_; }
  const Matrix& data() const { return data_; }

  double loss(const ProductPoint& p, std::span<const std::size_t> rows, ProductGrad* g) const;
  double full_loss(const ProductPoint& p, ProductGrad* g) const;
  /// Σ_i log Σ_j ω_j p(x_i; Σ_j) over all rows
  double log_likelihood(const GmmModel& m) const;

  StochasticObjective stochastic() const;
  /// Σ_j = S^{-1/2} R_j S^{-1/2} with S the data second moment and R_j
  /// seeded random SPD matrices (eigenvalues in [0.5, 2]); logits zero.
  GmmModel initial_model(std::uint64_t seed) const;
  /// Inverse of the uncentered second moment: the k = 1 maximizer.
  SpdMatrix single_component_optimum() const;

 private:
  Matrix data_;
  std::size_t k_;
};

struct GmmSynthetic {
  Matrix data;
  std::vector<SpdMatrix> covariances;
  Vector weights;
};

/// Zero-mean mixture with `k` random covariance components, rows = samples.
GmmSynthetic gmm_synthetic(Eigen::Index n, std::size_t k, std::size_t samples, std::uint64_t seed);

// --------------------------------------------------------------------- PCA

/// d²_bw(A, B) for A, B of any equal size; A, B need only be SPD.
double bw_distance_sq(const SpdMatrix& a, const SpdMatrix& b);

/// Σ_i d²_bw(WᵀX_iW, WᵀX̄W) and its gradient in W.
class PcaProblem {
 public:
  PcaProblem(std::vector<SpdMatrix> samples, SpdMatrix x_bar, Eigen::Index d);
  /// x_bar computed as the BW barycenter of the samples
  static PcaProblem with_barycenter(std::vector<SpdMatrix> samples, Eigen::Index d);

  const std::vector<SpdMatrix>& samples() const { return samples_; }
  const SpdMatrix& x_bar() const { return x_bar_; }
  Eigen::Index d() const { return d_; }
  Eigen::Index n() const { return x_bar_.dim(); }

  double objective(const Matrix& w) const;
  Matrix gradient(const Matrix& w) const;

 private:
  std::vector<SpdMatrix> samples_;
  SpdMatrix x_bar_;
  Eigen::Index d_;
};

struct PcaFit {
  Matrix w;
  std::vector<double> objective;
  double initial_objective = 0.0;
};

PcaFit pca_fit(const PcaProblem& prob, std::uint64_t seed, const StiefelConfig& cfg = {});

Matrix reduce(const Matrix& w, const SpdMatrix& x);  // WᵀXW

// -------------------------------------------------------- metric learning

/// Σ_{i<j} log(1 + exp(A_ij d²(X_i, X_j; M⁻¹ = WWᵀ))) with A_ij = ±1.
class MetricLearnProblem {
 public:
  MetricLearnProblem(std::vector<SpdMatrix> samples, std::vector<int> labels, Eigen::Index d);

  const std::vector<SpdMatrix>& samples() const { return samples_; }
  const std::vector<int>& labels() const { return labels_; }
  Eigen::Index d() const { return d_; }
  Eigen::Index n() const { return samples_.front().dim(); }
  int adjacency(std::size_t i, std::size_t j) const { return labels_[i] == labels_[j] ? 1 : -1; }

  double objective(const Matrix& w) const;
  Matrix gradient(const Matrix& w) const;
  /// d²(X_i, X_j) with M⁻¹ = WWᵀ
  double pair_distance_sq(const Matrix& w, std::size_t i, std::size_t j) const;
  /// mean same-class d² / mean different-class d²
  double separation_ratio(const Matrix& w) const;

 private:
  std::vector<SpdMatrix> samples_;
  std::vector<int> labels_;
  Eigen::Index d_;
};

struct MetricFit {
  Matrix w;
  std::vector<double> objective;
};

MetricFit metric_learn_fit(const MetricLearnProblem& prob, std::uint64_t seed,
                           const DescentConfig& cfg = {});

// ------------------------------------------------------ synthetic classes

struct LabeledSpd {
  std::vector<SpdMatrix> points;
  std::vector<int> labels;
};

struct SpdClassConfig {
  Eigen::Index n = 20;
  int classes = 2;
  int per_class = 40;
  double ridge = 0.1;            // ε in QᵀB_kQ + εI
  double rotation_spread = 0.0;  // ≤ 0: Haar-random Q; otherwise polar(I + spread·G)
  std::uint64_t seed = 0;
};

/// X = QᵀB_kQ + εI with one base matrix B_k per class and a random orthogonal
/// Q per sample.
LabeledSpd spd_classes(const SpdClassConfig& cfg);

/// 1-NN accuracy of `test` against `train` under d²_bw after reduction by W
/// (W = nullopt: full dimension).
double nearest_neighbor_accuracy(const LabeledSpd& train, const LabeledSpd& test,
                                 const std::optional<Matrix>& w);

// ------------------------------------------------------ geodesic convexity

enum class ConvexFn { trace_linear, trace_quadratic, neg_logdet, spectral };

std::string convex_fn_name(ConvexFn f);

struct ConvexityConfig {
  Eigen::Index n = 4;
  int trials = 500;
  int t_points = 11;
  double slack = 1e-9;
  int spectral_k = 0;  // 0: k = n
  std::uint64_t seed = 0;
};

struct ConvexityReport {
  ConvexFn fn;
  int checks = 0;
  int violations = 0;
  double worst_gap = 0.0;  // max of f(γ(t)) − (1−t)f(X) − tf(Y)
  std::string witness;     // description of the worst violation, empty if none
};

/// f₁ = tr(XA), f₂ = tr(XAX) with A ⪰ 0, f₃ = −logdet X, f₄ = Σ_{j≤k} λ_j↓(X)².
double convex_fn_value(ConvexFn f, const SpdMatrix& x, const Matrix& a, int spectral_k);

ConvexityReport geodesic_convexity_suite(ConvexFn f, const ConvexityConfig& cfg);

}  // namespace gbw
