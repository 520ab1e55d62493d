#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "gbw/applications.hpp"
#include "gbw/random.hpp"
#include "support/oracles.hpp"

using namespace gbw;

namespace {

SpdMatrix scalar(double v) { return SpdMatrix(Matrix::Constant(1, 1, v)); }

// central differences of f along a symmetric direction
double dir_fd(const std::function<double(const SpdMatrix&)>& f, const SpdMatrix& x, const Matrix& u) {
  return oracle::central_diff5([&](double s) { return f(SpdMatrix(sym_part(x.matrix() + s * u))); }, 1e-5);
}

double mat_fd(const std::function<double(const Matrix&)>& f, const Matrix& w, const Matrix& u) {
  return oracle::central_diff5([&](double s) { return f(w + s * u); }, 1e-5);
}

double dot(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

LabeledSpd small_classes(std::uint64_t seed, Eigen::Index n = 6, int per_class = 6) {
  SpdClassConfig c;
  c.n = n;
  c.per_class = per_class;
  c.seed = seed;
  return spd_classes(c);
}

}  // namespace

// ------------------------------------------------------------------ log-det

TEST_CASE("log-det objective: closed-form optima") {
  Objective o = logdet_objective(SpdMatrix::identity(4));
  CHECK(o.cost(SpdMatrix::identity(4)) == doctest::Approx(4.0));
  Objective s = logdet_objective(scalar(2));
  CHECK(s.cost(scalar(0.5)) == doctest::Approx(-std::log(0.5) + 1.0));
  CHECK(s.egrad(scalar(0.5))(0, 0) == doctest::Approx(0.0));
  CHECK(s.cost(scalar(0.4)) > s.cost(scalar(0.5)));
  CHECK(s.cost(scalar(0.6)) > s.cost(scalar(0.5)));
}

TEST_CASE("log-det objective passes finite-difference checks") {
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 2 + t % 4;
    Objective o = logdet_objective(random_spd(rng, n));
    SpdMatrix x = random_spd(rng, n);
    Matrix u = random_sym(rng, n).matrix();
    CHECK(oracle::rel_err(dir_fd(o.cost, x, u), dot(o.egrad(x).matrix(), u)) < 1e-5);
    Matrix hfd = oracle::central_diff5_mat(
        [&](double s) { return Matrix(o.egrad(SpdMatrix(sym_part(x.matrix() + s * u))).matrix()); }, 1e-5);
    CHECK(oracle::rel_err(o.ehess(x, SymMatrix(u)).matrix(), hfd) < 1e-4);
  }
}

TEST_CASE("conditioned generator hits the requested condition number") {
  for (double cond : {1.0, 10.0, 1000.0}) {
    SpdMatrix x = conditioned_spd(20, cond, 5);
    CHECK(x.condition_number() == doctest::Approx(cond).epsilon(1e-8));
    CHECK(x.max_eigenvalue() * x.min_eigenvalue() == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK((conditioned_spd(6, 10, 3).matrix() - conditioned_spd(6, 10, 3).matrix()).norm() == 0.0);
  CHECK_THROWS_AS(conditioned_spd(3, 0.5, 1), ConfigError);
  LogDetProblem p = LogDetProblem::synthetic(5, 10, 2);
  CHECK((p.c.matrix() * p.x_star.matrix() - Matrix::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("log-det cost is geodesically convex under GBW") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    GbwManifold man(random_spd(rng, 3, 0.3, 3.0));
    Objective o = logdet_objective(random_spd(rng, 3));
    SpdMatrix x = random_spd(rng, 3), y = random_spd(rng, 3);
    GeodesicSegment seg = man.geodesic(x, y);
    for (int i = 0; i <= 10; ++i) {
      double s = i / 10.0;
      CHECK(o.cost(seg.eval(s)) <= (1 - s) * o.cost(x) + s * o.cost(y) + 1e-9);
    }
  }
}

// --------------------------------------------------------------------- GMM

TEST_CASE("gmm density at the origin") {
  Vector x = Vector::Zero(1);
  CHECK(gmm_density(x, scalar(1)) == doctest::Approx(std::sqrt(2 * std::numbers::pi) * std::exp(0.5)));
  CHECK(gmm_density(x, scalar(1)) == doctest::Approx(4.1327).epsilon(1e-4));
  CHECK(gmm_log_density(x, scalar(1)) == doctest::Approx(std::log(gmm_density(x, scalar(1)))));
  CHECK_THROWS_AS(gmm_density(Vector::Zero(2), scalar(1)), DimensionError);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Vector l(3);
  l << 1.0, -2.0, 700.0;
  Vector w = softmax(l);
  CHECK(w.sum() == doctest::Approx(1.0));
  CHECK((softmax(l.array() + 5.0) - w).norm() < 1e-15);
}

TEST_CASE("gmm gradients match finite differences on a 20-sample batch") {
  auto syn = gmm_synthetic(2, 2, 200, 3);
  GmmObjective obj(syn.data, 2);
  GmmModel m = obj.initial_model(4);
  m.logits << 0.3, -0.2;
  ProductPoint p = m.as_point();
  std::vector<std::size_t> rows(20);
  std::iota(rows.begin(), rows.end(), 10);
  ProductGrad g;
  obj.loss(p, rows, &g);
  Rng rng(5);
  for (std::size_t j = 0; j < 2; ++j) {
    Matrix u = random_sym(rng, 2).matrix();
    auto f = [&](const SpdMatrix& s) {
      ProductPoint q = p;
      q.spd[j] = s;
      return obj.loss(q, rows, nullptr);
    };
    CHECK(oracle::rel_err(dir_fd(f, p.spd[j], u), dot(g.spd[j].matrix(), u)) < 1e-5);
  }
  Vector e = gaussian_vector(rng, 2);
  double fd = oracle::central_diff5(
      [&](double s) {
        ProductPoint q = p;
        q.euclid += s * e;
        return obj.loss(q, rows, nullptr);
      },
      1e-5);
  CHECK(oracle::rel_err(fd, g.euclid.dot(e)) < 1e-5);
}

TEST_CASE("gmm with one component: logit gradient vanishes, optimum is closed form") {
  auto syn = gmm_synthetic(2, 2, 2000, 7);
  GmmObjective obj(syn.data, 1);
  GmmModel m = obj.initial_model(7);
  ProductGrad g;
  obj.full_loss(m.as_point(), &g);
  CHECK(std::abs(g.euclid(0)) < 1e-15);

  SpdMatrix opt = obj.single_component_optimum();
  ProductGrad go;
  obj.full_loss({{opt}, Vector::Zero(1)}, &go);
  CHECK(go.spd[0].norm() < 1e-12);

  RsgdConfig cfg;
  cfg.step0 = 0.3;
  cfg.epochs = 50;
  cfg.batch = obj.data().rows();
  auto r = rsgd(GeometryKind::gbw_adaptive, obj.stochastic(), m.as_point(), cfg);
  CHECK((r.point.spd[0].matrix() - opt.matrix()).norm() <= 1e-3 * opt.matrix().norm());
}

TEST_CASE("gmm rsgd on a synthetic mixture drives the gradient proxy down") {
  auto syn = gmm_synthetic(2, 2, 2000, 7);
  GmmObjective obj(syn.data, 2);
  GmmModel init = obj.initial_model(7);
  RsgdConfig cfg;
  cfg.step0 = 1e-2;
  cfg.seed = 7;
  auto r = rsgd(GeometryKind::gbw_adaptive, obj.stochastic(), init.as_point(), cfg);
  REQUIRE(r.trace.rows.size() == 51);
  CHECK(r.trace.rows.front().grad_norm >= 10 * r.trace.rows.back().grad_norm);
  GmmModel fit = GmmModel::from_point(r.point);
  CHECK(obj.log_likelihood(fit) > obj.log_likelihood(init));
  CHECK(fit.weights().sum() == doctest::Approx(1.0));
  for (const auto& s : fit.sigmas) CHECK(is_positive_definite(s.matrix()));
  auto again = rsgd(GeometryKind::gbw_adaptive, obj.stochastic(), init.as_point(), cfg);
  CHECK(again.trace.to_csv() == r.trace.to_csv());
}

TEST_CASE("gmm input validation") {
  CHECK_THROWS_AS(GmmObjective(Matrix::Zero(0, 2), 1), ConfigError);
  CHECK_THROWS_AS(GmmObjective(Matrix::Ones(3, 2), 0), ConfigError);
  GmmObjective degenerate(Matrix::Ones(5, 2), 1);
  CHECK_THROWS_AS(degenerate.single_component_optimum(), DegenerateInputError);
}

// --------------------------------------------------------------------- PCA

TEST_CASE("pca: full dimension reproduces the unreduced deviation") {
  Rng rng(8);
  std::vector<SpdMatrix> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(random_spd(rng, 4));
  PcaProblem p = PcaProblem::with_barycenter(xs, 4);
  double direct = 0.0;
  for (const auto& x : xs) direct += oracle::bw_distance_sq(x.matrix(), p.x_bar().matrix());
  Matrix q = random_orthogonal(rng, 4);
  CHECK(p.objective(q) == doctest::Approx(direct).epsilon(1e-9));
  BarycenterProblem bp(xs, GbwManifold::bures_wasserstein(4));
  CHECK(bp.optimality_residual(p.x_bar()).norm() <= 1e-8);
}

TEST_CASE("pca: identical samples give zero for every W") {
  Rng rng(9);
  SpdMatrix x = random_spd(rng, 5);
  PcaProblem p(std::vector<SpdMatrix>(4, x), x, 2);
  for (int t = 0; t < 5; ++t) CHECK(std::abs(p.objective(Stiefel(5, 2).random_point(t))) < 1e-12);
}

TEST_CASE("pca: invariance under W -> WR and gradient check") {
  Rng rng(10);
  std::vector<SpdMatrix> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(random_spd(rng, 6));
  PcaProblem p = PcaProblem::with_barycenter(xs, 3);
  Matrix w = Stiefel(6, 3).random_point(2);
  for (int t = 0; t < 5; ++t) {
    Matrix r = random_orthogonal(rng, 3);
    CHECK(std::abs(p.objective(w * r) - p.objective(w)) <= 1e-9 * std::max(1.0, p.objective(w)));
  }
  for (int t = 0; t < 5; ++t) {
    Matrix u = gaussian_matrix(rng, 6, 3);
    CHECK(oracle::rel_err(mat_fd([&](const Matrix& v) { return p.objective(v); }, w, u),
                          dot(p.gradient(w), u)) < 1e-5);
  }
}

TEST_CASE("pca fit ascends monotonically and stays orthonormal") {
  LabeledSpd data = small_classes(11, 8, 5);
  PcaProblem p = PcaProblem::with_barycenter(data.points, 3);
  PcaFit fit = pca_fit(p, 3);
  CHECK(Stiefel(8, 3).contains(fit.w, 1e-8));
  CHECK(fit.initial_objective == fit.objective.front());
  for (size_t i = 1; i < fit.objective.size(); ++i) CHECK(fit.objective[i] >= fit.objective[i - 1]);
  CHECK(fit.objective.back() >= fit.initial_objective);
  CHECK_THROWS_AS(PcaProblem(data.points, data.points.front(), 9), DimensionError);
}

// -------------------------------------------------------- metric learning

TEST_CASE("metric learning: identity factor gives the BW distance") {
  LabeledSpd d = small_classes(12, 4, 3);
  MetricLearnProblem p(d.points, d.labels, 4);
  Matrix eye = Matrix::Identity(4, 4);
  for (std::size_t i = 0; i + 1 < d.points.size(); ++i)
    CHECK(p.pair_distance_sq(eye, i, i + 1) ==
          doctest::Approx(oracle::bw_distance_sq(d.points[i].matrix(), d.points[i + 1].matrix())));
}

TEST_CASE("metric learning: invariance, adjacency and gradient check") {
  LabeledSpd d = small_classes(13, 5, 3);
  MetricLearnProblem p(d.points, d.labels, 3);
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    for (std::size_t j = 0; j < d.labels.size(); ++j)
      CHECK(p.adjacency(i, j) == (d.labels[i] == d.labels[j] ? 1 : -1));
  Rng rng(14);
  Matrix w = 0.5 * gaussian_matrix(rng, 5, 3);
  for (int t = 0; t < 5; ++t) {
    Matrix r = random_orthogonal(rng, 3);
    CHECK(std::abs(p.objective(w * r) - p.objective(w)) <= 1e-10 * std::max(1.0, p.objective(w)));
  }
  for (int t = 0; t < 5; ++t) {
    Matrix u = gaussian_matrix(rng, 5, 3);
    CHECK(oracle::rel_err(mat_fd([&](const Matrix& v) { return p.objective(v); }, w, u),
                          dot(p.gradient(w), u)) < 1e-5);
  }
}

TEST_CASE("metric learning rejects single-class input") {
  LabeledSpd d = small_classes(15, 3, 2);
  std::vector<int> same(d.points.size(), 0);
  CHECK_THROWS_AS(MetricLearnProblem(d.points, same, 2), PreconditionError);
  CHECK_THROWS_AS(MetricLearnProblem(d.points, std::vector<int>{0, 1}, 2), DimensionError);
}

TEST_CASE("metric learning: all-dissimilar data pushes distances apart monotonically") {
  LabeledSpd d = small_classes(16, 4, 2);
  std::vector<int> distinct(d.points.size());
  std::iota(distinct.begin(), distinct.end(), 0);
  MetricLearnProblem p(d.points, distinct, 2);
  DescentConfig cfg;
  cfg.max_iters = 30;
  MetricFit fit = metric_learn_fit(p, 1, cfg);
  for (size_t i = 1; i < fit.objective.size(); ++i) CHECK(fit.objective[i] <= fit.objective[i - 1]);
  CHECK(fit.objective.back() < fit.objective.front());
  Matrix w0 = Stiefel(4, 2).random_point(1);
  CHECK(p.pair_distance_sq(fit.w, 0, 1) > p.pair_distance_sq(w0, 0, 1));
}

TEST_CASE("metric learning tightens classes relative to the separation") {
  LabeledSpd d = small_classes(17, 6, 6);
  MetricLearnProblem p(d.points, d.labels, 3);
  DescentConfig cfg;
  cfg.max_iters = 60;
  MetricFit fit = metric_learn_fit(p, 2, cfg);
  for (size_t i = 1; i < fit.objective.size(); ++i) CHECK(fit.objective[i] <= fit.objective[i - 1]);
  Matrix w0 = Stiefel(6, 3).random_point(2);
  CHECK(p.separation_ratio(fit.w) < p.separation_ratio(w0));
}

// ------------------------------------------------------ synthetic classes

TEST_CASE("synthetic classes: sizes, labels, determinism and ridge") {
  SpdClassConfig c;
  c.n = 5;
  c.per_class = 4;
  c.classes = 3;
  c.seed = 4;
  LabeledSpd a = spd_classes(c), b = spd_classes(c);
  REQUIRE(a.points.size() == 12);
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK((a.points[i].matrix() - b.points[i].matrix()).norm() == 0.0);
    CHECK(a.points[i].min_eigenvalue() >= c.ridge * (1 - 1e-12));
  }
  CHECK(std::count(a.labels.begin(), a.labels.end(), 2) == 4);
  // rotations preserve the class spectrum up to the ridge
  Vector s0 = a.points[0].eig().values, s3 = a.points[3].eig().values;
  CHECK((s0 - s3).norm() < 1e-10);
  c.rotation_spread = 0.1;
  CHECK(spd_classes(c).points.size() == 12);
  c.n = 0;
  CHECK_THROWS_AS(spd_classes(c), ConfigError);
}

TEST_CASE("nearest neighbour: a set classifies itself perfectly") {
  LabeledSpd d = small_classes(18, 5, 4);
  CHECK(nearest_neighbor_accuracy(d, d, std::nullopt) == 1.0);
  CHECK(nearest_neighbor_accuracy(d, d, Matrix(Matrix::Identity(5, 5))) == 1.0);
}

// ------------------------------------------------------ geodesic convexity

TEST_CASE("convexity functions: trivial cases") {
  Rng rng(19);
  SpdMatrix x = random_spd(rng, 4);
  CHECK(convex_fn_value(ConvexFn::trace_linear, x, Matrix::Zero(4, 4), 0) == 0.0);
  CHECK(convex_fn_value(ConvexFn::spectral, x, Matrix(), 0) ==
        doctest::Approx(x.matrix().squaredNorm()));
  CHECK(convex_fn_value(ConvexFn::spectral, x, Matrix(), 1) ==
        doctest::Approx(x.max_eigenvalue() * x.max_eigenvalue()));
  GbwManifold man(random_spd(rng, 4));
  GeodesicSegment seg = man.geodesic(x, x);
  for (int i = 0; i <= 10; ++i)
    CHECK(convex_fn_value(ConvexFn::neg_logdet, seg.eval(i / 10.0), Matrix(), 0) ==
          doctest::Approx(-x.logdet()).epsilon(1e-12));
}

TEST_CASE("geodesic convexity sweep: no violations for any of the four functions") {
  for (auto f : {ConvexFn::trace_linear, ConvexFn::trace_quadratic, ConvexFn::neg_logdet, ConvexFn::spectral}) {
    ConvexityConfig cfg;
    cfg.seed = 21;
    ConvexityReport r = geodesic_convexity_suite(f, cfg);
    CAPTURE(convex_fn_name(f));
    CAPTURE(r.witness);
    CHECK(r.checks == 500 * 11);
    CHECK(r.violations == 0);
    CHECK(r.witness.empty());
    CHECK(r.worst_gap <= 1e-9);
  }
}

TEST_CASE("convexity sweep validates its configuration") {
  ConvexityConfig cfg;
  cfg.t_points = 1;
  CHECK_THROWS_AS(geodesic_convexity_suite(ConvexFn::spectral, cfg), ConfigError);
  cfg.t_points = 11;
  cfg.n = 0;
  CHECK_THROWS_AS(geodesic_convexity_suite(ConvexFn::trace_linear, cfg), ConfigError);
}
