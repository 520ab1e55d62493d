#include "gbw/barycenter.hpp"

#include <cmath>
#include <sstream>

#include "gbw/matrix_io.hpp"

namespace gbw {

namespace {

Matrix psd_sqrt(const Matrix& z) {
  EigPair e = sym_eig(sym_part(z));
  return e.reconstruct([](double v) { return std::sqrt(std::max(0.0, v)); });
}

}  // namespace

BarycenterProblem::BarycenterProblem(std::vector<SpdMatrix> points, Vector weights,
                                     GbwManifold manifold)
    : points_(std::move(points)), weights_(std::move(weights)), manifold_(std::move(manifold)) {
  if (points_.empty()) throw PreconditionError("barycenter: no points");
  if (weights_.size() != static_cast<Eigen::Index>(points_.size()))
    throw DimensionError("barycenter: weight count does not match point count");
  for (const auto& p : points_) require_same_dim(p.dim(), manifold_.dim(), "barycenter");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite())
    throw PreconditionError("barycenter: weights must be nonnegative");
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "barycenter: weights sum to " << weights_.sum() << ", expected 1";
    throw PreconditionError(os.str());
  }
}

BarycenterProblem::BarycenterProblem(std::vector<SpdMatrix> points, GbwManifold manifold)
    : BarycenterProblem(points, Vector::Constant(points.size(), 1.0 / points.size()), manifold) {}

double BarycenterProblem::objective(const SpdMatrix& a) const {
  double f = 0.0;
  for (size_t l = 0; l < points_.size(); ++l)
    if (weights_(l) > 0.0) f += weights_(l) * manifold_.distance_squared(a, points_[l]);
  return f;
}

namespace {

// Σ w_l (A^{1/2} M⁻¹ X_l M⁻¹ A^{1/2})^{1/2}
Matrix weighted_root_sum(const BarycenterProblem& p, const Matrix& ah) {
  const Matrix& mi = p.manifold().param().m_inv().matrix();
  Matrix s = Matrix::Zero(ah.rows(), ah.cols());
  for (size_t l = 0; l < p.points().size(); ++l) {
    double w = p.weights()(l);
    if (w == 0.0) continue;
    s += w * psd_sqrt(ah * mi * p.points()[l].matrix() * mi * ah);
  }
  return sym_part(s);
}

}  // namespace

SpdMatrix BarycenterProblem::fixed_point_map(const SpdMatrix& a) const {
  const Matrix& m = manifold_.param().m().matrix();
  Matrix ah = a.sqrt().matrix();
  Matrix aih = a.invsqrt().matrix();
  Matrix s = weighted_root_sum(*this, ah);
  Matrix left = m * aih * s;
  return SpdMatrix(sym_part(left * left.transpose()));
}

Matrix BarycenterProblem::optimality_residual(const SpdMatrix& a) const {
  const Matrix& mi = manifold_.param().m_inv().matrix();
  Matrix ah = a.sqrt().matrix();
  return sym_part(ah * mi * ah) - weighted_root_sum(*this, ah);
}

SpdMatrix BarycenterProblem::euclidean_mean() const {
  Matrix s = Matrix::Zero(manifold_.dim(), manifold_.dim());
  for (size_t l = 0; l < points_.size(); ++l) s += weights_(l) * points_[l].matrix();
  return SpdMatrix(sym_part(s));
}

BarycenterResult barycenter(const BarycenterProblem& prob, const BarycenterOptions& opts) {
  if (!(opts.tol > 0.0) || opts.max_iters < 0)
    throw PreconditionError("barycenter: tol must be positive and max_iters nonnegative");
  BarycenterResult r{opts.init ? *opts.init : prob.euclidean_mean(), false, 0, {}, {}, 0.0};
  require_same_dim(r.point.dim(), prob.manifold().dim(), "barycenter init");
  r.objective.push_back(prob.objective(r.point));
  for (int it = 0; it < opts.max_iters; ++it) {
    SpdMatrix next = prob.fixed_point_map(r.point);
    double ch = (next.matrix() - r.point.matrix()).norm() / r.point.matrix().norm();
    r.point = std::move(next);
    r.iterations = it + 1;
    r.change.push_back(ch);
    r.objective.push_back(prob.objective(r.point));
    if (ch < opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.residual = prob.optimality_residual(r.point).norm();
  return r;
}

nlohmann::json BarycenterResult::to_json() const {
  return {{"converged", converged},   {"iterations", iterations}, {"objective", objective},
          {"change", change},         {"residual", residual},     {"point", matrix_to_json(point.matrix())}};
}

}  // namespace gbw
