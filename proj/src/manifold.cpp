#include "gbw/manifold.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "gbw/random.hpp"

namespace gbw {

std::string geometry_name(GeometryKind k) {
  switch (k) {
    case GeometryKind::gbw:
      return "gbw_fixed";
    case GeometryKind::gbw_adaptive:
      return "gbw";
    case GeometryKind::bw:
      return "bw";
    case GeometryKind::affine_invariant:
      return "ai";
  }
  return "unknown";
}

GeometryKind parse_geometry(const std::string& s) {
  if (s == "ai" || s == "affine_invariant") return GeometryKind::affine_invariant;
  if (s == "bw") return GeometryKind::bw;
  if (s == "gbw" || s == "gbw_adaptive") return GeometryKind::gbw_adaptive;
  if (s == "gbw_fixed") return GeometryKind::gbw;
  throw ConfigError("unknown geometry '" + s + "' (expected ai, bw, gbw or gbw_fixed)");
}

double SpdGeometry::norm(const SpdMatrix& x, const SymMatrix& u) const {
  return std::sqrt(std::max(0.0, inner(x, u, u)));
}

namespace {
double frob_dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }
SymMatrix symp(const Matrix& a) { return SymMatrix::symmetric_part(a); }
}  // namespace

// --------------------------------------------------------------------- GBW

GbwGeometry::GbwGeometry(const GbwParam& m, bool is_bw) : man_(m), bw_(is_bw) {}

std::unique_ptr<GbwGeometry> GbwGeometry::bures_wasserstein(Eigen::Index n) {
  return std::make_unique<GbwGeometry>(GbwParam::identity(n), true);
}

double GbwGeometry::inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const {
  return man_.inner(x, u, v);
}

SymMatrix GbwGeometry::rgrad(const SpdMatrix& x, const SymMatrix& egrad) const {
  require_same_dim(x.dim(), egrad.dim(), "rgrad");
  const Matrix& m = man_.param().m().matrix();
  Matrix a = 2.0 * x.matrix() * egrad.matrix() * m;
  return symp(a + a.transpose());
}

SymMatrix GbwGeometry::rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                             const SymMatrix& u) const {
  require_same_dim(x.dim(), u.dim(), "rhess");
  const Matrix& m = man_.param().m().matrix();
  const Matrix& xm = x.matrix();
  const Matrix& g = egrad.matrix();
  Matrix l = man_.lyapunov(x).solve(u).matrix();
  Matrix grad = rgrad(x, egrad).matrix();
  Matrix inner_s = sym_part(g * m * l);
  Matrix h = 4.0 * sym_part(m * ehess_u.matrix() * xm) + 2.0 * sym_part(m * g * u.matrix()) +
             4.0 * sym_part(xm * inner_s * m) - sym_part(m * l * grad);
  return symp(h);
}

SpdMatrix GbwGeometry::exp(const SpdMatrix& x, const SymMatrix& u) const { return man_.exp(x, u); }

// ------------------------------------------------------------ adaptive GBW

double AdaptiveGbwGeometry::inner(const SpdMatrix& x, const SymMatrix& u,
                                  const SymMatrix& v) const {
  Matrix xi = x.inv().matrix();
  return 0.25 * frob_dot(xi * u.matrix() * xi, v.matrix());
}

SymMatrix AdaptiveGbwGeometry::rgrad(const SpdMatrix& x, const SymMatrix& egrad) const {
  return symp(4.0 * x.matrix() * egrad.matrix() * x.matrix());
}

SymMatrix AdaptiveGbwGeometry::rhess(const SpdMatrix& x, const SymMatrix& egrad,
                                     const SymMatrix& ehess_u, const SymMatrix& u) const {
  // the fixed-M formula with M = X frozen at the current point
  return GbwGeometry(GbwParam(x)).rhess(x, egrad, ehess_u, u);
}

SpdMatrix AdaptiveGbwGeometry::exp(const SpdMatrix& x, const SymMatrix& u) const {
  if (!is_positive_definite(sym_part(x.matrix() + 0.5 * u.matrix())))
    throw InjectivityDomainError("exp: X + U/2 is not positive definite");
  Matrix r = sym_part(x.matrix() + u.matrix() + 0.25 * u.matrix() * x.inv().matrix() * u.matrix());
  if (!is_positive_definite(r))
    throw InjectivityDomainError("exp: result is numerically outside the SPD cone");
  return SpdMatrix(r);
}

// ---------------------------------------------------------------------- AI

double AiGeometry::inner(const SpdMatrix& x, const SymMatrix& u, const SymMatrix& v) const {
  Matrix xi = x.inv().matrix();
  return frob_dot(xi * u.matrix() * xi, v.matrix());
}

SymMatrix AiGeometry::rgrad(const SpdMatrix& x, const SymMatrix& egrad) const {
  return symp(x.matrix() * egrad.matrix() * x.matrix());
}

SymMatrix AiGeometry::rhess(const SpdMatrix& x, const SymMatrix& egrad, const SymMatrix& ehess_u,
                            const SymMatrix& u) const {
  const Matrix& xm = x.matrix();
  return symp(xm * ehess_u.matrix() * xm + sym_part(u.matrix() * egrad.matrix() * xm));
}

SpdMatrix AiGeometry::exp(const SpdMatrix& x, const SymMatrix& u) const {
  Matrix xs = x.sqrt().matrix();
  Matrix xis = x.invsqrt().matrix();
  EigPair e = sym_eig(sym_part(xis * u.matrix() * xis));
  if (e.values(0) > 700.0) throw InjectivityDomainError("exp: step overflows the matrix exponential");
  Matrix ex = e.reconstruct([](double v) { return std::exp(v); });
  Matrix r = sym_part(xs * ex * xs);
  if (!is_positive_definite(r))
    throw InjectivityDomainError("exp: result is numerically outside the SPD cone");
  return SpdMatrix(r);
}

std::unique_ptr<SpdGeometry> make_geometry(GeometryKind kind, Eigen::Index n,
                                           const std::optional<GbwParam>& m) {
  switch (kind) {
    case GeometryKind::affine_invariant:
      return std::make_unique<AiGeometry>();
    case GeometryKind::gbw_adaptive:
      return std::make_unique<AdaptiveGbwGeometry>();
    case GeometryKind::bw:
      return GbwGeometry::bures_wasserstein(n);
    case GeometryKind::gbw:
      if (!m) throw ConfigError("gbw_fixed geometry needs a parameter matrix M");
      require_same_dim(m->dim(), n, "make_geometry");
      return std::make_unique<GbwGeometry>(*m);
  }
  throw ConfigError("unknown geometry");
}

std::vector<SymMatrix> symmetric_basis(Eigen::Index n) {
  std::vector<SymMatrix> out;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
      }
      out.emplace_back(e);
    }
  return out;
}

// ----------------------------------------------------------------- Stiefel

Stiefel::Stiefel(Eigen::Index n, Eigen::Index d) : n_(n), d_(d) {
  if (n <= 0 || d <= 0 || d > n) throw DimensionError("Stiefel: need 0 < d <= n");
}

Matrix Stiefel::project_tangent(const Matrix& w, const Matrix& u) const {
  Matrix wu = w.transpose() * u;
  return u - w * sym_part(wu);
}

Matrix Stiefel::retract(const Matrix& w, const Matrix& u) const {
  Matrix a = w + u;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) > kPdFloor * s(0))) throw SingularInputError("Stiefel retraction: rank loss");
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix Stiefel::random_point(std::uint64_t seed) const {
  Rng rng(seed);
  Matrix q = random_orthogonal(rng, n_);
  return q.leftCols(d_);
}

bool Stiefel::contains(const Matrix& w, double tol) const {
  return w.rows() == n_ && w.cols() == d_ &&
         (w.transpose() * w - Matrix::Identity(d_, d_)).norm() <= tol;
}

}  // namespace gbw
