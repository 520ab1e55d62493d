#include "gbw/applications.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>

#include "gbw/random.hpp"

namespace gbw {

// ------------------------------------------------------------------ log-det

Objective logdet_objective(const SpdMatrix& c) {
  Objective o;
  o.cost = [c](const SpdMatrix& x) { return -x.logdet() + (c.matrix() * x.matrix()).trace(); };
  o.egrad = [c](const SpdMatrix& x) { return SymMatrix::symmetric_part(c.matrix() - x.inv().matrix()); };
  o.ehess = [](const SpdMatrix& x, const SymMatrix& u) {
    Matrix xi = x.inv().matrix();
    return SymMatrix::symmetric_part(xi * u.matrix() * xi);
  };
  return o;
}

SpdMatrix conditioned_spd(Eigen::Index n, double cond, std::uint64_t seed) {
  if (!(cond >= 1.0)) throw ConfigError("condition number must be >= 1");
  Rng rng(seed);
  Matrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Vector lam(n);
  double lo = -0.5 * std::log10(cond), hi = 0.5 * std::log10(cond);
  for (Eigen::Index i = 0; i < n; ++i)
    lam(i) = std::pow(10.0, n == 1 ? 0.0 : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return SpdMatrix::from_eig(lam, q);
}

LogDetProblem LogDetProblem::synthetic(Eigen::Index n, double cond, std::uint64_t seed) {
  SpdMatrix xs = conditioned_spd(n, cond, seed);
  return {xs.inv(), xs};
}

// --------------------------------------------------------------------- GMM

double gmm_log_density(const Vector& x, const SpdMatrix& sigma) {
  require_same_dim(x.size(), sigma.dim(), "gmm_density");
  const double d = static_cast<double>(x.size());
  return (1.0 - 0.5 * d) * std::log(2.0 * std::numbers::pi) + 0.5 * sigma.logdet() + 0.5 -
         0.5 * x.dot(sigma.matrix() * x);
}

double gmm_density(const Vector& x, const SpdMatrix& sigma) { return std::exp(gmm_log_density(x, sigma)); }

Vector softmax(const Vector& logits) {
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

GmmObjective::GmmObjective(Matrix data, std::size_t k) : data_(std::move(data)), k_(k) {
  if (k_ == 0) throw ConfigError("gmm: component count must be at least 1");
  if (data_.rows() == 0 || data_.cols() == 0) throw ConfigError("gmm: empty dataset");
  if (!data_.allFinite()) throw ConfigError("gmm: non-finite data");
}

double GmmObjective::loss(const ProductPoint& p, std::span<const std::size_t> rows,
                          ProductGrad* g) const {
  if (p.spd.size() != k_ || static_cast<std::size_t>(p.euclid.size()) != k_)
    throw DimensionError("gmm: point does not have k components");
  const Eigen::Index n = data_.cols();
  std::vector<Matrix> inv(k_);
  Vector logdet(k_);
  for (std::size_t j = 0; j < k_; ++j) {
    require_same_dim(p.spd[j].dim(), n, "gmm");
    inv[j] = p.spd[j].inv().matrix();
    logdet(j) = p.spd[j].logdet();
  }
  Vector w = softmax(p.euclid);
  Vector logw = w.array().log();
  const double c0 = (1.0 - 0.5 * n) * std::log(2.0 * std::numbers::pi) + 0.5;

  std::vector<Matrix> acc(k_, Matrix::Zero(n, n));  // Σ_i r_ij x_i x_iᵀ
  Vector rsum = Vector::Zero(k_);
  double total = 0.0;
  Vector a(k_);
  for (std::size_t i : rows) {
    Vector x = data_.row(i).transpose();
    for (std::size_t j = 0; j < k_; ++j)
      a(j) = logw(j) + c0 + 0.5 * logdet(j) - 0.5 * x.dot(p.spd[j].matrix() * x);
    double mx = a.maxCoeff();
    double lse = mx + std::log((a.array() - mx).exp().sum());
    total += lse;
    if (g) {
      Vector r = (a.array() - lse).exp();
      rsum += r;
      Matrix xx = x * x.transpose();
      for (std::size_t j = 0; j < k_; ++j) acc[j] += r(j) * xx;
    }
  }
  const double b = static_cast<double>(rows.size());
  if (g) {
    g->spd.clear();
    for (std::size_t j = 0; j < k_; ++j)
      g->spd.push_back(SymMatrix::symmetric_part(-(0.5 * rsum(j) * inv[j] - 0.5 * acc[j]) / b));
    g->euclid = -(rsum - b * w) / b;
  }
  return -total / b;
}

double GmmObjective::full_loss(const ProductPoint& p, ProductGrad* g) const {
  std::vector<std::size_t> all(data_.rows());
  std::iota(all.begin(), all.end(), 0);
  return loss(p, all, g);
}

double GmmObjective::log_likelihood(const GmmModel& m) const {
  return -full_loss(m.as_point(), nullptr) * static_cast<double>(data_.rows());
}

StochasticObjective GmmObjective::stochastic() const {
  StochasticObjective s;
  s.num_samples = static_cast<std::size_t>(data_.rows());
  s.batch = [this](const ProductPoint& p, std::span<const std::size_t> b, ProductGrad& g) {
    return loss(p, b, &g);
  };
  s.full = [this](const ProductPoint& p, ProductGrad& g) { return full_loss(p, &g); };
  return s;
}

namespace {
SpdMatrix second_moment(const Matrix& data) {
  Matrix s = data.transpose() * data / static_cast<double>(data.rows());
  if (!is_positive_definite(s))
    throw DegenerateInputError("gmm: data second moment is singular");
  return SpdMatrix(sym_part(s));
}
}  // namespace

GmmModel GmmObjective::initial_model(std::uint64_t seed) const {
  SpdMatrix sis = second_moment(data_).invsqrt();
  Rng rng(seed);
  GmmModel m;
  for (std::size_t j = 0; j < k_; ++j) {
    SpdMatrix r = random_spd(rng, data_.cols(), 0.5, 2.0);
    m.sigmas.emplace_back(sym_part(sis.matrix() * r.matrix() * sis.matrix()));
  }
  m.logits = Vector::Zero(k_);
  return m;
}

SpdMatrix GmmObjective::single_component_optimum() const { return second_moment(data_).inv(); }

GmmSynthetic gmm_synthetic(Eigen::Index n, std::size_t k, std::size_t samples, std::uint64_t seed) {
  if (k == 0 || samples == 0 || n <= 0) throw ConfigError("gmm synthetic: sizes must be positive");
  Rng rng(seed);
  GmmSynthetic out;
  std::vector<Matrix> roots;
  for (std::size_t j = 0; j < k; ++j) {
    out.covariances.push_back(random_spd(rng, n, 0.1, 5.0));
    roots.push_back(out.covariances.back().sqrt().matrix());
  }
  out.weights.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.weights(j) = uniform(rng, 0.5, 1.5);
  out.weights /= out.weights.sum();
  std::discrete_distribution<std::size_t> pick(out.weights.data(), out.weights.data() + k);
  out.data.resize(samples, n);
  for (std::size_t i = 0; i < samples; ++i) {
    std::size_t j = pick(rng);
    out.data.row(i) = (roots[j] * gaussian_vector(rng, n)).transpose();
  }
  return out;
}

// --------------------------------------------------------------------- PCA

double bw_distance_sq(const SpdMatrix& a, const SpdMatrix& b) {
  return GbwManifold::bures_wasserstein(a.dim()).distance_squared(a, b);
}

Matrix reduce(const Matrix& w, const SpdMatrix& x) { return sym_part(w.transpose() * x.matrix() * w); }

namespace {

// ∇_W d²_bw(WᵀXW, WᵀYW) = 2XW + 2YW − 2(XW(A⁻¹#B) + YW(B⁻¹#A))
Matrix pair_gradient(const Matrix& xw, const Matrix& yw, const SpdMatrix& a, const SpdMatrix& b) {
  Matrix gab = geometric_mean(a.inv(), b).matrix();
  Matrix gba = geometric_mean(b.inv(), a).matrix();
  return 2.0 * (xw + yw) - 2.0 * (xw * gab + yw * gba);
}

}  // namespace

PcaProblem::PcaProblem(std::vector<SpdMatrix> samples, SpdMatrix x_bar, Eigen::Index d)
    : samples_(std::move(samples)), x_bar_(std::move(x_bar)), d_(d) {
  if (samples_.empty()) throw PreconditionError("pca: no samples");
  for (const auto& s : samples_) require_same_dim(s.dim(), x_bar_.dim(), "pca");
  if (d_ <= 0 || d_ > x_bar_.dim()) throw DimensionError("pca: need 0 < d <= n");
}

PcaProblem PcaProblem::with_barycenter(std::vector<SpdMatrix> samples, Eigen::Index d) {
  if (samples.empty()) throw PreconditionError("pca: no samples");
  BarycenterProblem bp(samples, GbwManifold::bures_wasserstein(samples.front().dim()));
  BarycenterResult r = barycenter(bp);
  return PcaProblem(std::move(samples), r.point, d);
}

double PcaProblem::objective(const Matrix& w) const {
  SpdMatrix b(reduce(w, x_bar_));
  double s = 0.0;
  for (const auto& x : samples_) s += bw_distance_sq(SpdMatrix(reduce(w, x)), b);
  return s;
}

Matrix PcaProblem::gradient(const Matrix& w) const {
  SpdMatrix b(reduce(w, x_bar_));
  Matrix xbw = x_bar_.matrix() * w;
  Matrix g = Matrix::Zero(w.rows(), w.cols());
  for (const auto& x : samples_) g += pair_gradient(x.matrix() * w, xbw, SpdMatrix(reduce(w, x)), b);
  return g;
}

PcaFit pca_fit(const PcaProblem& prob, std::uint64_t seed, const StiefelConfig& cfg) {
  Stiefel st(prob.n(), prob.d());
  Matrix w0 = st.random_point(seed);
  StiefelConfig c = cfg;
  c.maximize = true;
  StiefelResult r = stiefel_optimize(
      st, [&](const Matrix& w) { return prob.objective(w); },
      [&](const Matrix& w) { return prob.gradient(w); }, w0, c);
  return {r.w, r.objective, r.objective.front()};
}

// -------------------------------------------------------- metric learning

MetricLearnProblem::MetricLearnProblem(std::vector<SpdMatrix> samples, std::vector<int> labels,
                                       Eigen::Index d)
    : samples_(std::move(samples)), labels_(std::move(labels)), d_(d) {
  if (samples_.size() < 2) throw PreconditionError("metric learning: need at least two samples");
  if (labels_.size() != samples_.size()) throw DimensionError("metric learning: label count mismatch");
  for (const auto& s : samples_) require_same_dim(s.dim(), samples_.front().dim(), "metric learning");
  if (d_ <= 0 || d_ > samples_.front().dim()) throw DimensionError("metric learning: need 0 < d <= n");
  if (std::all_of(labels_.begin(), labels_.end(), [&](int l) { return l == labels_.front(); }))
    throw PreconditionError("metric learning: all samples share one class (no dissimilar pair)");
}

namespace {
// pairs combine two reductions, so conditioning multiplies: 1e5² stays
// inside the SPD floor
constexpr double kMetricCondFloor = 1e-5;
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double logistic(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
}  // namespace

double MetricLearnProblem::pair_distance_sq(const Matrix& w, std::size_t i, std::size_t j) const {
  return bw_distance_sq(SpdMatrix(reduce(w, samples_[i])), SpdMatrix(reduce(w, samples_[j])));
}

double MetricLearnProblem::objective(const Matrix& w) const {
  std::vector<SpdMatrix> red;
  red.reserve(samples_.size());
  for (const auto& s : samples_) red.emplace_back(reduce(w, s));
  double f = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i)
    for (std::size_t j = i + 1; j < samples_.size(); ++j)
      f += softplus(adjacency(i, j) * bw_distance_sq(red[i], red[j]));
  return f;
}

Matrix MetricLearnProblem::gradient(const Matrix& w) const {
  std::vector<SpdMatrix> red;
  std::vector<Matrix> xw;
  for (const auto& s : samples_) {
    red.emplace_back(reduce(w, s));
    xw.push_back(s.matrix() * w);
  }
  Matrix g = Matrix::Zero(w.rows(), w.cols());
  for (std::size_t i = 0; i < samples_.size(); ++i)
    for (std::size_t j = i + 1; j < samples_.size(); ++j) {
      double a = adjacency(i, j);
      double coeff = a * logistic(a * bw_distance_sq(red[i], red[j]));
      g += coeff * pair_gradient(xw[i], xw[j], red[i], red[j]);
    }
  return g;
}

double MetricLearnProblem::separation_ratio(const Matrix& w) const {
  double same = 0.0, diff = 0.0;
  int ns = 0, nd = 0;
  for (std::size_t i = 0; i < samples_.size(); ++i)
    for (std::size_t j = i + 1; j < samples_.size(); ++j) {
      double d2 = pair_distance_sq(w, i, j);
      if (adjacency(i, j) > 0) {
        same += d2;
        ++ns;
      } else {
        diff += d2;
        ++nd;
      }
    }
  if (ns == 0 || nd == 0) throw PreconditionError("separation ratio needs both pair kinds");
  return (same / ns) / (diff / nd);
}

MetricFit metric_learn_fit(const MetricLearnProblem& prob, std::uint64_t seed, const DescentConfig& cfg) {
  Matrix w0 = Stiefel(prob.n(), prob.d()).random_point(seed);
  // candidates whose reductions are nearly singular are infeasible: the
  // gradient needs well-conditioned inverses of every WᵀX_iW
  auto f = [&](const Matrix& w) {
    for (const auto& x : prob.samples()) {
      EigPair e = sym_eig(reduce(w, x));
      if (!(e.values(e.values.size() - 1) > kMetricCondFloor * e.values(0)))
        return std::numeric_limits<double>::infinity();
    }
    return prob.objective(w);
  };
  DescentResult r = gradient_descent(f, [&](const Matrix& w) { return prob.gradient(w); }, w0, cfg);
  return {r.w, r.objective};
}

// ------------------------------------------------------ synthetic classes

LabeledSpd spd_classes(const SpdClassConfig& cfg) {
  if (cfg.n <= 0 || cfg.classes <= 0 || cfg.per_class <= 0 || !(cfg.ridge >= 0.0))
    throw ConfigError("spd classes: sizes must be positive and ridge nonnegative");
  Rng rng(cfg.seed);
  std::vector<Matrix> bases;
  for (int k = 0; k < cfg.classes; ++k) {
    // class spectra: log-uniform in [0.2, 2], scaled by (1 + k)
    Vector lam(cfg.n);
    for (Eigen::Index i = 0; i < cfg.n; ++i)
      lam(i) = (1.0 + k) * std::exp(uniform(rng, std::log(0.2), std::log(2.0)));
    bases.push_back(SpdMatrix::from_eig(lam, random_orthogonal(rng, cfg.n)).matrix());
  }
  LabeledSpd out;
  for (int s = 0; s < cfg.per_class; ++s)
    for (int k = 0; k < cfg.classes; ++k) {
      Matrix q;
      if (cfg.rotation_spread <= 0.0) {
        q = random_orthogonal(rng, cfg.n);
      } else {
        q = polar_factor(Matrix::Identity(cfg.n, cfg.n) + cfg.rotation_spread * gaussian_matrix(rng, cfg.n, cfg.n));
      }
      Matrix x = q.transpose() * bases[k] * q + cfg.ridge * Matrix::Identity(cfg.n, cfg.n);
      out.points.emplace_back(sym_part(x));
      out.labels.push_back(k);
    }
  return out;
}

double nearest_neighbor_accuracy(const LabeledSpd& train, const LabeledSpd& test,
                                 const std::optional<Matrix>& w) {
  if (train.points.empty() || test.points.empty()) throw PreconditionError("nearest neighbor: empty set");
  auto prep = [&](const SpdMatrix& x) { return w ? SpdMatrix(reduce(*w, x)) : x; };
  std::vector<SpdMatrix> tr;
  for (const auto& p : train.points) tr.push_back(prep(p));
  int correct = 0;
  for (std::size_t i = 0; i < test.points.size(); ++i) {
    SpdMatrix q = prep(test.points[i]);
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (std::size_t j = 0; j < tr.size(); ++j) {
      double d = bw_distance_sq(q, tr[j]);
      if (d < best) {
        best = d;
        label = train.labels[j];
      }
    }
    if (label == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.points.size());
}

// ------------------------------------------------------ geodesic convexity

std::string convex_fn_name(ConvexFn f) {
  switch (f) {
    case ConvexFn::trace_linear:
      return "trace_linear";
    case ConvexFn::trace_quadratic:
      return "trace_quadratic";
    case ConvexFn::neg_logdet:
      return "neg_logdet";
    case ConvexFn::spectral:
      return "spectral";
  }
  return "unknown";
}

double convex_fn_value(ConvexFn f, const SpdMatrix& x, const Matrix& a, int spectral_k) {
  switch (f) {
    case ConvexFn::trace_linear:
      return (x.matrix() * a).trace();
    case ConvexFn::trace_quadratic:
      return (x.matrix() * a * x.matrix()).trace();
    case ConvexFn::neg_logdet:
      return -x.logdet();
    case ConvexFn::spectral: {
      const Vector& lam = x.eig().values;  // descending
      int k = spectral_k > 0 ? std::min<int>(spectral_k, lam.size()) : static_cast<int>(lam.size());
      return lam.head(k).squaredNorm();
    }
  }
  return NAN;
}

ConvexityReport geodesic_convexity_suite(ConvexFn f, const ConvexityConfig& cfg) {
  if (cfg.n <= 0 || cfg.trials < 0 || cfg.t_points < 2) throw ConfigError("convexity: invalid sizes");
  Rng rng(cfg.seed);
  ConvexityReport rep;
  rep.fn = f;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    GbwManifold man(random_spd(rng, cfg.n, 0.3, 3.0));
    SpdMatrix x = random_spd(rng, cfg.n, 0.2, 5.0), y = random_spd(rng, cfg.n, 0.2, 5.0);
    Matrix g = gaussian_matrix(rng, cfg.n, cfg.n);
    Matrix a = g * g.transpose() / static_cast<double>(cfg.n);
    GeodesicSegment seg = man.geodesic(x, y);
    double fx = convex_fn_value(f, x, a, cfg.spectral_k), fy = convex_fn_value(f, y, a, cfg.spectral_k);
    for (int i = 0; i < cfg.t_points; ++i) {
      double t = static_cast<double>(i) / (cfg.t_points - 1);
      double ft = convex_fn_value(f, seg.eval(t), a, cfg.spectral_k);
      double gap = ft - ((1.0 - t) * fx + t * fy);
      ++rep.checks;
      if (rep.checks == 1 || gap > rep.worst_gap) rep.worst_gap = gap;
      if (gap > cfg.slack) {
        ++rep.violations;
        if (gap >= rep.worst_gap) {
          std::ostringstream os;
          os << "trial " << trial << ", t = " << t << ": f(gamma(t)) exceeds the chord by " << gap;
          rep.witness = os.str();
        }
      }
    }
  }
  return rep;
}

}  // namespace gbw
