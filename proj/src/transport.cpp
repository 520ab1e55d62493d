#include "gbw/transport.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "gbw/random.hpp"

namespace gbw {

double f_tilde(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y) {
  return man.fidelity(x, y);
}

namespace {

SpdMatrix whitened(const GbwManifold& man, const SpdMatrix& y) {
  const Matrix& mi = man.param().m_inv().matrix();
  return SpdMatrix(sym_part(mi * y.matrix() * mi));
}

}  // namespace

double f_tilde_additive(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y,
                        const SpdMatrix& a) {
  SpdMatrix yw = whitened(man, y);
  return 0.5 * ((x.matrix() * a.matrix()).trace() + (yw.matrix() * a.inv().matrix()).trace());
}

double f_tilde_product(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y,
                       const SpdMatrix& a) {
  SpdMatrix yw = whitened(man, y);
  return std::sqrt((x.matrix() * a.matrix()).trace() * (yw.matrix() * a.inv().matrix()).trace());
}

SpdMatrix f_tilde_minimizer(const GbwManifold& man, const SpdMatrix& x, const SpdMatrix& y) {
  return geometric_mean(x.inv(), whitened(man, y));
}

double gaussian_w2(const GaussianMeasure& mu, const GaussianMeasure& nu, const GbwParam& m) {
  return GbwManifold(m).distance_squared(mu.cov, nu.cov);
}

Matrix transport_plan(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m) {
  require_same_dim(x.dim(), y.dim(), "transport_plan");
  require_same_dim(x.dim(), m.dim(), "transport_plan");
  GbwManifold man(m);
  return m.m().matrix() * f_tilde_minimizer(man, x, y).matrix();
}

double transport_cost(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m, const Matrix& t) {
  const Matrix& mi = m.m_inv().matrix();
  return (mi * x.matrix()).trace() + (mi * y.matrix()).trace() - 2.0 * (mi * t * x.matrix()).trace();
}

double monte_carlo_transport_cost(const SpdMatrix& x, const Matrix& t, const GbwParam& m,
                                  std::int64_t samples, std::uint64_t seed, bool parallel) {
  if (samples <= 0) throw PreconditionError("monte_carlo_transport_cost: samples must be positive");
  constexpr std::int64_t kChunk = 1 << 16;
  const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
  const Matrix xs = x.sqrt().matrix();
  const Matrix resid = (Matrix::Identity(x.dim(), x.dim()) - t) * xs;  // x − Tx = (I − T) X^{1/2} z
  const Matrix& mi = m.m_inv().matrix();
  const Matrix g = resid.transpose() * mi * resid;

  auto run_chunk = [&](std::int64_t c) {
    std::seed_seq ss{seed, static_cast<std::uint64_t>(c)};
    Rng rng(ss);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::int64_t count = std::min(kChunk, samples - c * kChunk);
    Vector z(x.dim());
    double sum = 0.0;
    for (std::int64_t s = 0; s < count; ++s) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(rng);
      sum += z.dot(g * z);
    }
    return sum;
  };

  std::vector<double> partial(chunks);
  if (parallel) {
    std::vector<std::future<double>> fs;
    for (std::int64_t c = 0; c < chunks; ++c) fs.push_back(std::async(std::launch::async, run_chunk, c));
    for (std::int64_t c = 0; c < chunks; ++c) partial[c] = fs[c].get();
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) partial[c] = run_chunk(c);
  }
  double total = 0.0;
  for (double p : partial) total += p;  // fixed order
  return total / static_cast<double>(samples);
}

// ------------------------------------------------------------------ robust

SymMatrix RobustConstraintSet::project(const SymMatrix& s) const {
  EigPair e = sym_eig(s);
  return SymMatrix::symmetric_part(
      e.reconstruct([this](double v) { return std::clamp(v, floor, 1.0); }));
}

bool RobustConstraintSet::contains(const SymMatrix& s, double tol) const {
  EigPair e = sym_eig(s);
  return e.values.minCoeff() >= -tol && e.values.maxCoeff() <= 1.0 + tol;
}

double robust_objective(const SpdMatrix& x, const SpdMatrix& y, const SymMatrix& s) {
  require_same_dim(x.dim(), y.dim(), "robust_objective");
  require_same_dim(x.dim(), s.dim(), "robust_objective");
  // tr((X^{1/2}SYSX^{1/2})^{1/2}) is the nuclear norm of Y^{1/2}SX^{1/2}
  Matrix w = y.sqrt().matrix() * s.matrix() * x.sqrt().matrix();
  Eigen::JacobiSVD<Matrix> svd(w);
  double nuc = svd.singularValues().sum();
  return (s.matrix() * (x.matrix() + y.matrix())).trace() - 2.0 * nuc;
}

SymMatrix robust_gradient(const SpdMatrix& x, const SpdMatrix& y, const SymMatrix& s) {
  Matrix xs = x.sqrt().matrix();
  Matrix ys = y.sqrt().matrix();
  Eigen::JacobiSVD<Matrix> svd(ys * s.matrix() * xs, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix o = svd.matrixU() * svd.matrixV().transpose();
  Matrix c = ys * o * xs;
  return SymMatrix::symmetric_part(x.matrix() + y.matrix() - (c + c.transpose()));
}

RobustResult robust_distance(const SpdMatrix& x, const SpdMatrix& y, const RobustConstraintSet& c,
                             const RobustAscentConfig& cfg) {
  require_same_dim(x.dim(), y.dim(), "robust_distance");
  if (!(cfg.step > 0.0) || cfg.max_iters < 0 || cfg.max_halvings < 0)
    throw PreconditionError("robust_distance: invalid ascent configuration");
  RobustResult r;
  if (cfg.init) require_same_dim(cfg.init->dim(), x.dim(), "robust_distance");
  r.s = c.project(cfg.init ? *cfg.init : SymMatrix::identity(x.dim()));
  r.value = robust_objective(x, y, r.s);
  r.trace.push_back(r.value);
  for (int it = 0; it < cfg.max_iters; ++it) {
    SymMatrix g = robust_gradient(x, y, r.s);
    double step = cfg.step;
    bool accepted = false;
    SymMatrix cand;
    double val = r.value;
    for (int h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
      cand = c.project(r.s + step * g);
      val = robust_objective(x, y, cand);
      if (val >= r.value) {
        accepted = true;
        break;
      }
    }
    r.iterations = it + 1;
    if (!accepted) {
      // no ascent direction left at any tried step: stationary up to roundoff
      r.trace.push_back(r.value);
      r.converged = true;
      break;
    }
    double move = (cand - r.s).norm();
    r.s = cand;
    r.value = val;
    r.trace.push_back(r.value);
    if (move < cfg.stationarity_tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

nlohmann::json RobustResult::to_json() const {
  return {{"value", value}, {"converged", converged}, {"iterations", iterations}, {"trace", trace}};
}

}  // namespace gbw
