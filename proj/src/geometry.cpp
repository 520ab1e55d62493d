#include "gbw/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbw {

namespace {

// tr of the square root of a PSD symmetric matrix; tiny negative eigenvalues
// from roundoff are treated as zero.
double trace_sqrt_psd(const Matrix& z) {
  EigPair e = sym_eig(sym_part(z));
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) s += std::sqrt(std::max(0.0, e.values(i)));
  return s;
}

}  // namespace

// ------------------------------------------------------------ GeodesicSegment

GeodesicSegment::GeodesicSegment(const SpdMatrix& x, const SpdMatrix& y, const GbwParam& m)
    : x_(x),
      y_(y),
      m_(m),
      x_sqrt_(x.sqrt().matrix()),
      o_(polar_factor(y.sqrt().matrix() * m.m_inv().matrix() * x.sqrt().matrix())),
      k_(geometric_mean(y, SpdMatrix(sym_part(m.m().matrix() * x.inv().matrix() * m.m().matrix())))) {
  require_same_dim(x.dim(), y.dim(), "geodesic");
  require_same_dim(x.dim(), m.dim(), "geodesic");
  ysqrt_o_ = y.sqrt().matrix() * o_;
}

SpdMatrix GeodesicSegment::eval(double t) const {
  if (t == 0.0) return x_;
  if (t == 1.0) return y_;
  Matrix psi = (1.0 - t) * x_sqrt_ + t * ysqrt_o_;
  Matrix g = sym_part(psi * psi.transpose());
  if (!is_positive_definite(g)) {
    std::ostringstream os;
    os << "geodesic at t = " << t << " leaves the SPD cone";
    throw OutOfConeError(os.str());
  }
  return SpdMatrix(g);
}

Matrix GeodesicSegment::eval_polynomial(double t) const {
  const Matrix& x = x_.matrix();
  Matrix km = k_.matrix() * m_.m_inv().matrix() * x;
  return sym_part((1.0 - t) * (1.0 - t) * x + t * t * y_.matrix() +
                  t * (1.0 - t) * (km + km.transpose()));
}

Matrix GeodesicSegment::velocity(double t) const {
  const Matrix& m = m_.m().matrix();
  Matrix b = m_.m_inv().matrix() * x_.matrix() * m_.m_inv().matrix();
  Matrix km = k_.matrix() - m;
  Matrix e = (1.0 - t) * m + t * k_.matrix();
  Matrix a = km * b * e;
  return sym_part(a + a.transpose());
}

Matrix GeodesicSegment::acceleration(double) const {
  Matrix b = m_.m_inv().matrix() * x_.matrix() * m_.m_inv().matrix();
  Matrix km = k_.matrix() - m_.m().matrix();
  return sym_part(2.0 * km * b * km);
}

nlohmann::json GeodesicSegment::to_json(int grid_points) const {
  nlohmann::json out;
  nlohmann::json ts = nlohmann::json::array();
  nlohmann::json pts = nlohmann::json::array();
  int g = std::max(grid_points, 2);
  for (int i = 0; i < g; ++i) {
    double t = static_cast<double>(i) / (g - 1);
    ts.push_back(t);
    Matrix p = eval(t).matrix();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < p.cols(); ++c) row.push_back(p(r, c));
      rows.push_back(row);
    }
    pts.push_back({{"dim", p.rows()}, {"entries", rows}});
  }
  out["t"] = ts;
  out["points"] = pts;
  return out;
}

// ---------------------------------------------------------------- GbwManifold

GbwManifold::GbwManifold(const GbwParam& m) : m_(m) {}
GbwManifold::GbwManifold(const SpdMatrix& m) : m_(m) {}
GbwManifold GbwManifold::bures_wasserstein(Eigen::Index n) {
  return GbwManifold(GbwParam::identity(n));
}

double GbwManifold::inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const {
  require_same_dim(u.dim(), v.dim(), "inner");
  SymMatrix l = lyapunov(x).solve(u);
  return 0.5 * (l.matrix().cwiseProduct(v.matrix())).sum();
}

double GbwManifold::norm(const SpdMatrix& x, const SymMatrix& u) const {
  return std::sqrt(std::max(0.0, inner(x, u, u)));
}

double GbwManifold::fidelity(const SpdMatrix& x, const SpdMatrix& y) const {
  require_same_dim(x.dim(), dim(), "distance");
  require_same_dim(y.dim(), dim(), "distance");
  Matrix xs = x.sqrt().matrix();
  const Matrix& mi = m_.m_inv().matrix();
  return trace_sqrt_psd(xs * mi * y.matrix() * mi * xs);
}

double GbwManifold::distance_squared(const SpdMatrix& x, const SpdMatrix& y) const {
  const Matrix& mi = m_.m_inv().matrix();
  double a = (mi * x.matrix()).trace();
  double b = (mi * y.matrix()).trace();
  double r = a + b - 2.0 * fidelity(x, y);
  if (r < 0.0) {
    // roundoff scales with the magnitude of the two trace terms
    if (r >= -kRadicandSlack * std::max(1.0, a + b)) return 0.0;
    std::ostringstream os;
    os << "distance: negative radicand " << r;
    throw NumericalError(os.str());
  }
  return r;
}

double GbwManifold::distance(const SpdMatrix& x, const SpdMatrix& y) const {
  return std::sqrt(distance_squared(x, y));
}

Matrix GbwManifold::polar(const SpdMatrix& x, const SpdMatrix& y) const {
  require_same_dim(x.dim(), y.dim(), "polar");
  return polar_factor(y.sqrt().matrix() * m_.m_inv().matrix() * x.sqrt().matrix());
}

ProcrustesResult GbwManifold::procrustes(const SpdMatrix& x, const SpdMatrix& y) const {
  Matrix o = polar(x, y);
  Matrix diff = x.sqrt().matrix() - y.sqrt().matrix() * o;
  double v = (diff.transpose() * m_.m_inv().matrix() * diff).trace();
  return {std::sqrt(std::max(0.0, v)), o};
}

PolarForms GbwManifold::polar_forms(const SpdMatrix& x, const SpdMatrix& y) const {
  require_same_dim(x.dim(), y.dim(), "polar_forms");
  const Matrix& m = m_.m().matrix();
  const Matrix& mi = m_.m_inv().matrix();
  Matrix xs = x.sqrt().matrix();
  SpdMatrix ys = y.sqrt();
  SpdMatrix mxm(sym_part(m * x.inv().matrix() * m));
  PolarForms f;
  f.svd = polar(x, y);
  SpdMatrix z(sym_part(xs * mi * y.matrix() * mi * xs));
  f.inverse = ys.matrix() * mi * xs * z.invsqrt().matrix();
  f.product = ys.matrix() * sqrt_of_product(y.inv(), mxm) * mi * xs;
  f.mean = y.invsqrt().matrix() * geometric_mean(y, mxm).matrix() * mi * xs;
  return f;
}

GeodesicSegment GbwManifold::geodesic(const SpdMatrix& x, const SpdMatrix& y) const {
  return GeodesicSegment(x, y, m_);
}

bool GbwManifold::exp_in_domain(const SpdMatrix& x, const SymMatrix& u) const {
  const Matrix& m = m_.m().matrix();
  SymMatrix l = lyapunov(x).solve(u);
  return is_positive_definite(sym_part(m + m * l.matrix() * m));
}

SpdMatrix GbwManifold::exp(const SpdMatrix& x, const SymMatrix& u) const {
  require_same_dim(x.dim(), u.dim(), "exp");
  const Matrix& m = m_.m().matrix();
  Matrix l = lyapunov(x).solve(u).matrix();
  Matrix mlm = m * l * m;
  if (!is_positive_definite(sym_part(m + mlm)))
    throw InjectivityDomainError("exp: M + M L M is not positive definite");
  Matrix mlx = m * l * x.matrix();
  Matrix r = sym_part(x.matrix() + u.matrix() + mlx * l * m);
  if (!is_positive_definite(r))
    throw InjectivityDomainError("exp: result is numerically outside the SPD cone");
  return SpdMatrix(r);
}

SymMatrix GbwManifold::log(const SpdMatrix& x, const SpdMatrix& y) const {
  require_same_dim(x.dim(), y.dim(), "log");
  const Matrix& m = m_.m().matrix();
  const Matrix& mi = m_.m_inv().matrix();
  SpdMatrix b(sym_part(mi * x.matrix() * mi));
  Matrix r = sqrt_of_product(b, y);  // (B Y)^{1/2}
  Matrix by = b.matrix() * y.matrix();
  double resid = (r * r - by).norm() / std::max(1e-300, by.norm());
  if (!(resid <= 1e-6)) {
    std::ostringstream os;
    os << "log: square root of M^-1 X M^-1 Y inaccurate (relative residual " << resid << ")";
    throw NumericalError(os.str());
  }
  Matrix mr = m * r;
  return SymMatrix::symmetric_part(mr + mr.transpose() - 2.0 * x.matrix());
}

double GbwManifold::second_order_check(const SpdMatrix& x, const SymMatrix& h,
                                       double theta) const {
  if (h.norm() == 0.0) return 0.0;
  SpdMatrix y(sym_part(x.matrix() + theta * h.matrix()));
  double d2 = distance_squared(x, y);
  SymMatrix l = lyapunov(x).solve(h);
  double quad = 0.5 * theta * theta * l.matrix().cwiseProduct(h.matrix()).sum();
  return std::abs(d2 - quad) / (theta * theta);
}

SymMatrix GbwManifold::levi_civita(const SpdMatrix& x, const SymMatrix& xi, const SymMatrix& eta,
                                   const SymMatrix& d_xi_eta) const {
  require_same_dim(xi.dim(), dim(), "levi_civita");
  require_same_dim(eta.dim(), dim(), "levi_civita");
  require_same_dim(d_xi_eta.dim(), dim(), "levi_civita");
  GenLyapunov lyap = lyapunov(x);
  const Matrix& m = m_.m().matrix();
  Matrix le = lyap.solve(eta).matrix();
  Matrix lx = lyap.solve(xi).matrix();
  const Matrix& xm = x.matrix();
  Matrix quad = xm * le * m * lx * m + xm * lx * m * le * m;
  Matrix r = d_xi_eta.matrix() + sym_part(quad) - sym_part(m * le * xi.matrix()) -
             sym_part(m * lx * eta.matrix());
  return SymMatrix::symmetric_part(r);
}

// -------------------------------------------------------------------- fiber

SpdMatrix GbwManifold::project_fiber(const Matrix& p) const {
  require_square(p, "project_fiber");
  require_same_dim(p.rows(), dim(), "project_fiber");
  const Matrix& ms = m_.m_sqrt().matrix();
  Matrix x = sym_part(ms * p * p.transpose() * ms);
  if (!is_positive_definite(x)) throw SingularInputError("project_fiber: P is singular");
  return SpdMatrix(x);
}

Matrix GbwManifold::fiber_point(const SpdMatrix& x) const {
  return m_.m_invsqrt().matrix() * x.sqrt().matrix();
}

Matrix GbwManifold::horizontal_lift(const Matrix& p, const SymMatrix& u) const {
  SpdMatrix x = project_fiber(p);
  const Matrix& ms = m_.m_sqrt().matrix();
  return ms * lyapunov(x).solve(u).matrix() * ms * p;
}

FiberSplit GbwManifold::split(const Matrix& p, const Matrix& u) const {
  require_same_dim(u.rows(), dim(), "split");
  require_same_dim(u.cols(), dim(), "split");
  SpdMatrix x = project_fiber(p);
  const Matrix& ms = m_.m_sqrt().matrix();
  const Matrix& mis = m_.m_invsqrt().matrix();

  Matrix upt = u * p.transpose();
  SymMatrix s = lyapunov(x).solve(SymMatrix::symmetric_part(ms * (upt + upt.transpose()) * ms));

  Eigen::PartialPivLU<Matrix> lu(p);
  Matrix pinv = lu.inverse();
  Matrix up = u * pinv;
  Matrix rhs = mis * (up - up.transpose()) * mis;
  Matrix k = GenLyapunov(x.inv(), m_.m_inv()).solve_general(rhs);
  k = 0.5 * (k - k.transpose());

  FiberSplit out{ms * s.matrix() * ms * p, mis * k * mis * pinv.transpose(), s, k};
  return out;
}

Matrix GbwManifold::horizontal_project(const Matrix& p, const Matrix& u) const {
  return split(p, u).horizontal;
}

Matrix GbwManifold::vertical_project(const Matrix& p, const Matrix& u) const {
  return split(p, u).vertical;
}

namespace {

struct SortedSvd {
  Matrix u;
  Vector sigma;  // descending
  Matrix v;
};

SortedSvd svd_of(const Matrix& p) {
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) > kPdFloor * s(0))) throw SingularInputError("fiber point is singular");
  return {svd.matrixU(), s, svd.matrixV()};
}

}  // namespace

double GbwManifold::sectional_curvature(const Matrix& p, const Matrix& u_tilde,
                                        const Matrix& v_tilde) const {
  require_square(p, "sectional_curvature");
  require_same_dim(p.rows(), dim(), "sectional_curvature");
  for (const Matrix* w : {&u_tilde, &v_tilde}) {
    double nw = w->norm();
    if (nw == 0.0) throw PreconditionError("sectional_curvature: zero tangent vector");
    double vn = vertical_project(p, *w).norm();
    if (vn > 1e-8 * nw) {
      std::ostringstream os;
      os << "sectional_curvature: input is not horizontal (relative vertical part " << vn / nw << ")";
      throw PreconditionError(os.str());
    }
  }
  double uu = u_tilde.squaredNorm();
  double vv = v_tilde.squaredNorm();
  double uv = u_tilde.cwiseProduct(v_tilde).sum();
  double q = uu * vv - uv * uv;
  if (!(q > 1e-14 * uu * vv))
    throw PreconditionError("sectional_curvature: tangent vectors are linearly dependent");

  SortedSvd s = svd_of(p);
  Matrix c = s.v.transpose() * (v_tilde.transpose() * u_tilde - u_tilde.transpose() * v_tilde) * s.v;
  const Eigen::Index n = p.rows();
  double k = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double si = s.sigma(i) * s.sigma(i);
      double sj = s.sigma(j) * s.sigma(j);
      k += 3.0 * c(i, j) * c(i, j) * si / ((si + sj) * (si + sj));
    }
  return k / q;
}

CurvatureBounds GbwManifold::curvature_bounds(const Matrix& p) const {
  require_square(p, "curvature_bounds");
  require_same_dim(p.rows(), dim(), "curvature_bounds");
  const Eigen::Index n = p.rows();
  if (n < 2) throw PreconditionError("curvature_bounds: needs dimension at least 2");
  SortedSvd s = svd_of(p);
  double sn = s.sigma(n - 1);
  double sn1 = s.sigma(n - 2);
  CurvatureBounds b;
  b.k_max = 3.0 / (sn * sn + sn1 * sn1);

  double c = std::sqrt(1.0 / (sn * sn) + 1.0 / (sn1 * sn1));
  Matrix du = Matrix::Zero(n, n);
  du(n - 2, n - 2) = 2.0;
  du(n - 1, n - 1) = -2.0;
  Matrix dv = Matrix::Zero(n, n);
  dv(n - 1, n - 2) = dv(n - 2, n - 1) = 1.0;
  Vector sinv = s.sigma.cwiseInverse();
  const Matrix& mis = m_.m_invsqrt().matrix();
  Matrix left = mis * s.u * sinv.asDiagonal();
  b.s_u = SymMatrix::symmetric_part(left * du * left.transpose() / (2.0 * c));
  b.s_v = SymMatrix::symmetric_part(left * dv * left.transpose() / c);
  return b;
}

double GbwManifold::interpolate_inequality(const SpdMatrix& x, const SpdMatrix& y,
                                           double t) const {
  GeodesicSegment seg = geodesic(x, y);
  Matrix mix = (1.0 - t) * x.matrix() + t * y.matrix();
  return loewner_gap(SymMatrix::symmetric_part(seg.eval_polynomial(t)),
                     SymMatrix::symmetric_part(mix));
}

}  // namespace gbw
