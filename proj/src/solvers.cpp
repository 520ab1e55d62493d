#include "gbw/solvers.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gbw/matrix_io.hpp"
#include "gbw/random.hpp"

namespace gbw {

const char* SolveTrace::csv_header() {
  return "iter,cumulative_inner_iters,cost,grad_norm,step,dist_to_ref";
}

std::string SolveTrace::to_csv() const {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ',' + std::to_string(r.cumulative_inner_iters) + ',' +
           format_double(r.cost) + ',' + format_double(r.grad_norm) + ',' + format_double(r.step) +
           ',' + (std::isnan(r.dist_to_ref) ? std::string() : format_double(r.dist_to_ref)) + '\n';
  }
  return out;
}

namespace {

double spectral_norm_sym(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct TcgOutput {
  SymMatrix eta;
  SymMatrix h_eta;
  int inner = 0;
  bool hit_boundary = false;
};

// Steihaug-Toint truncated conjugate gradient on the trust-region model.
TcgOutput truncated_cg(const SpdGeometry& g, const SpdMatrix& x, const SymMatrix& egrad,
                       const SymMatrix& grad, const std::function<SymMatrix(const SymMatrix&)>& ehess,
                       double delta, int max_inner, double kappa, double theta) {
  const Eigen::Index n = x.dim();
  TcgOutput out{SymMatrix::zero(n), SymMatrix::zero(n), 0, false};
  SymMatrix r = grad;
  double rr = g.inner(x, r, r);
  double norm_r0 = std::sqrt(rr);
  SymMatrix d = -r;
  double e_pe = 0.0, e_pd = 0.0, d_pd = rr;
  for (int j = 0; j < max_inner; ++j) {
    SymMatrix hd = g.rhess(x, egrad, ehess(d), d);
    double dhd = g.inner(x, d, hd);
    ++out.inner;
    double alpha = rr / dhd;
    double e_pe_new = e_pe + 2.0 * alpha * e_pd + alpha * alpha * d_pd;
    if (!(dhd > 0.0) || e_pe_new >= delta * delta) {
      double tau = (-e_pd + std::sqrt(e_pd * e_pd + d_pd * (delta * delta - e_pe))) / d_pd;
      out.eta = out.eta + tau * d;
      out.h_eta = out.h_eta + tau * hd;
      out.hit_boundary = true;
      return out;
    }
    out.eta = out.eta + alpha * d;
    out.h_eta = out.h_eta + alpha * hd;
    r = r + alpha * hd;
    e_pe = e_pe_new;
    double rr_old = rr;
    rr = g.inner(x, r, r);
    double norm_r = std::sqrt(rr);
    if (norm_r <= norm_r0 * std::min(std::pow(norm_r0, theta), kappa)) break;
    double beta = rr / rr_old;
    d = -r + beta * d;
    e_pd = beta * (e_pd + alpha * d_pd);
    d_pd = rr + beta * beta * d_pd;
  }
  return out;
}

using GeometryAt = std::function<const SpdGeometry&(int iter, const SpdMatrix& x)>;

TrustRegionResult trust_region_impl(const GeometryAt& geom_at, const Objective& obj,
                                    const SpdMatrix& x0, const TrustRegionConfig& cfg) {
  if (!obj.cost || !obj.egrad || !obj.ehess)
    throw PreconditionError("trust_region: objective needs cost, egrad and ehess");
  if (!(cfg.gtol > 0.0) || cfg.max_outer < 0 || !(cfg.kappa > 0.0) || !(cfg.delta_max_factor >= 1.0))
    throw PreconditionError("trust_region: invalid configuration");
  const Eigen::Index n = x0.dim();
  const int max_inner = cfg.max_inner > 0 ? cfg.max_inner : static_cast<int>(n * (n + 1) / 2);
  const double delta0 = cfg.delta0 ? *cfg.delta0 : x0.matrix().norm() / 8.0;
  const double delta_max = cfg.delta_max_factor * delta0;
  double delta = delta0;

  TrustRegionResult res{x0, {}};
  SpdMatrix& x = res.point;
  double fx = obj.cost(x);
  long inner_total = 0;
  auto dist = [&](const SpdMatrix& p) {
    return cfg.reference ? spectral_norm_sym(p.matrix() - cfg.reference->matrix()) : NAN;
  };

  for (int it = 0;; ++it) {
    const SpdGeometry& g = geom_at(it, x);
    SymMatrix eg = obj.egrad(x);
    SymMatrix grad = g.rgrad(x, eg);
    double gn = g.norm(x, grad);
    if (it == 0) res.trace.rows.push_back({0, 0, fx, gn, 0.0, dist(x)});
    if (gn < cfg.gtol) {
      res.trace.converged = true;
      res.trace.message = "gradient norm below tolerance";
      break;
    }
    if (it >= cfg.max_outer) {
      res.trace.message = "outer iteration cap reached";
      break;
    }
    if (!(delta > 1e-300)) {
      res.trace.message = "trust-region radius collapsed";
      break;
    }

    auto hess_dir = [&](const SymMatrix& u) { return obj.ehess(x, u); };
    TcgOutput t = truncated_cg(g, x, eg, grad, hess_dir, delta, max_inner, cfg.kappa, cfg.theta);
    inner_total += t.inner;

    double model_dec = -(g.inner(x, grad, t.eta) + 0.5 * g.inner(x, t.eta, t.h_eta));
    double step_norm = g.norm(x, t.eta);
    bool accepted = false;
    double rho = -std::numeric_limits<double>::infinity();
    std::optional<SpdMatrix> cand;
    double fc = 0.0;
    // near the optimum, cost differences drown in roundoff of f itself
    const double reg = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
    try {
      cand = g.exp(x, t.eta);
      fc = obj.cost(*cand);
      rho = ((fx - fc) + reg) / (model_dec + reg);
      if (!std::isfinite(fc)) rho = -std::numeric_limits<double>::infinity();
    } catch (const InjectivityDomainError&) {
      cand.reset();
    } catch (const DegenerateInputError&) {
      cand.reset();
    }

    if (rho < 0.25) {
      delta *= 0.25;
    } else if (rho > 0.75 && t.hit_boundary) {
      delta = std::min(2.0 * delta, delta_max);
    }
    if (cand && rho > cfg.rho_accept && fc <= fx + reg) {
      x = *cand;
      fx = fc;
      accepted = true;
    }

    const SpdGeometry& g_next = geom_at(it + 1, x);
    double gn_next = accepted ? g_next.norm(x, g_next.rgrad(x, obj.egrad(x))) : gn;
    res.trace.rows.push_back({it + 1, inner_total, fx, gn_next, accepted ? step_norm : 0.0, dist(x)});
  }
  return res;
}

}  // namespace

TrustRegionResult trust_region(const SpdGeometry& geom, const Objective& obj, const SpdMatrix& x0,
                               const TrustRegionConfig& cfg) {
  return trust_region_impl([&](int, const SpdMatrix&) -> const SpdGeometry& { return geom; }, obj,
                           x0, cfg);
}

TrustRegionResult trust_region(GeometryKind kind, const Objective& obj, const SpdMatrix& x0,
                               const TrustRegionConfig& cfg) {
  if (kind != GeometryKind::gbw_adaptive || cfg.adaptive_cadence <= 1) {
    auto g = make_geometry(kind, x0.dim());
    return trust_region(*g, obj, x0, cfg);
  }
  // M refreshed to the iterate every `adaptive_cadence` outer iterations
  std::optional<GbwGeometry> frozen;
  int refreshed_at = -1;
  GeometryAt at = [&](int it, const SpdMatrix& x) -> const SpdGeometry& {
    if (!frozen || it - refreshed_at >= cfg.adaptive_cadence) {
      frozen.emplace(GbwParam(x));
      refreshed_at = it;
    }
    return *frozen;
  };
  return trust_region_impl(at, obj, x0, cfg);
}

// -------------------------------------------------------------------- RSGD

double euclidean_grad_proxy(const ProductPoint& x, const ProductGrad& g) {
  double s = 0.0;
  for (size_t j = 0; j < x.spd.size(); ++j) s += (x.spd[j].matrix() * g.spd[j].matrix()).squaredNorm();
  return std::sqrt(s);
}

RsgdResult rsgd(GeometryKind kind, const StochasticObjective& obj, const ProductPoint& x0,
                const RsgdConfig& cfg, const std::optional<GbwParam>& m) {
  if (!obj.batch || !obj.full) throw PreconditionError("rsgd: objective needs batch and full callbacks");
  if (obj.num_samples == 0) throw PreconditionError("rsgd: empty dataset");
  if (!(cfg.step0 > 0.0) || cfg.decay < 0.0 || cfg.batch == 0 || cfg.epochs < 0)
    throw PreconditionError("rsgd: invalid configuration");
  const Eigen::Index n = x0.spd.empty() ? 1 : x0.spd.front().dim();
  auto geom = make_geometry(kind, n, m);

  RsgdResult res{x0, {}};
  res.trace.seed = cfg.seed;
  ProductPoint& x = res.point;
  ProductGrad g;
  double f = obj.full(x, g);
  res.trace.rows.push_back({0, 0, f, euclidean_grad_proxy(x, g), cfg.step0, NAN});

  Rng rng(cfg.seed);
  std::vector<std::size_t> perm(obj.num_samples);
  std::iota(perm.begin(), perm.end(), 0);
  long t = 0;
  double alpha = cfg.step0;
  for (int ep = 1; ep <= cfg.epochs; ++ep) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t start = 0; start < perm.size(); start += cfg.batch) {
      std::size_t len = std::min(cfg.batch, perm.size() - start);
      std::span<const std::size_t> b(perm.data() + start, len);
      ProductGrad bg;
      obj.batch(x, b, bg);
      alpha = cfg.step0 / (1.0 + cfg.step0 * cfg.decay * static_cast<double>(t));
      for (size_t j = 0; j < x.spd.size(); ++j) {
        SymMatrix rg = geom->rgrad(x.spd[j], bg.spd[j]);
        if (rg.norm() == 0.0) continue;
        double a = alpha;
        int h = 0;
        for (;; ++h) {
          if (h > cfg.max_halvings) {
            res.trace.aborted = true;
            res.trace.message = "step underflow after repeated exp-map domain errors";
            return res;
          }
          try {
            x.spd[j] = geom->exp(x.spd[j], rg * (-a));
            break;
          } catch (const InjectivityDomainError&) {
            a *= 0.5;
          } catch (const DegenerateInputError&) {
            a *= 0.5;
          }
        }
      }
      if (x.euclid.size() > 0) x.euclid -= alpha * bg.euclid;
      ++t;
    }
    f = obj.full(x, g);
    res.trace.rows.push_back({ep, 0, f, euclidean_grad_proxy(x, g), alpha, NAN});
  }
  return res;
}

// ----------------------------------------------------------------- Stiefel

StiefelResult stiefel_optimize(const Stiefel& st, const std::function<double(const Matrix&)>& f,
                               const std::function<Matrix(const Matrix&)>& egrad, const Matrix& w0,
                               const StiefelConfig& cfg) {
  if (!st.contains(w0)) throw PreconditionError("stiefel_optimize: W0 is not orthonormal");
  const double sign = cfg.maximize ? 1.0 : -1.0;
  StiefelResult res{w0, {}, {}, false};
  double fw = f(res.w);
  res.objective.push_back(fw);
  double step = cfg.step0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Matrix g = st.rgrad(res.w, egrad(res.w));
    double gn = g.norm();
    res.grad_norm.push_back(gn);
    if (gn < cfg.gtol) {
      res.converged = true;
      break;
    }
    // try a larger step first, then backtrack
    step = std::min(2.0 * step, 1e6 * cfg.step0);
    bool accepted = false;
    for (int b = 0; b < cfg.max_backtracks; ++b, step *= cfg.shrink) {
      Matrix cand = st.retract(res.w, sign * step * g);
      double fc = f(cand);
      if (sign * (fc - fw) >= cfg.armijo * step * gn * gn) {
        res.w = cand;
        fw = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;  // no sufficient increase at any tried step
      break;
    }
    res.objective.push_back(fw);
  }
  return res;
}

DescentResult gradient_descent(const std::function<double(const Matrix&)>& f,
                               const std::function<Matrix(const Matrix&)>& egrad, const Matrix& w0,
                               const DescentConfig& cfg) {
  DescentResult res{w0, {}, {}, false};
  double fw = f(res.w);
  res.objective.push_back(fw);
  double step = cfg.step0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Matrix g = egrad(res.w);
    double gn = g.norm();
    res.grad_norm.push_back(gn);
    if (gn < cfg.gtol) {
      res.converged = true;
      break;
    }
    step = std::min(2.0 * step, 1e6 * cfg.step0);
    bool accepted = false;
    for (int b = 0; b < cfg.max_backtracks; ++b, step *= cfg.shrink) {
      Matrix cand = res.w - step * g;
      double fc = f(cand);
      if (fw - fc >= cfg.armijo * step * gn * gn) {
        res.w = cand;
        fw = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    res.objective.push_back(fw);
  }
  return res;
}

}  // namespace gbw
