#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbw/barycenter.hpp"
#include "gbw/random.hpp"
#include "support/oracles.hpp"

using namespace gbw;

namespace {
SpdMatrix scalar(double v) { return SpdMatrix(Matrix::Constant(1, 1, v)); }
Vector weights(std::initializer_list<double> w) {
  Vector v(w.size());
  Eigen::Index i = 0;
  for (double x : w) v(i++) = x;
  return v;
}
}  // namespace

TEST_CASE("single point is its own barycenter") {
  Rng rng(1);
  SpdMatrix x = random_spd(rng, 4);
  BarycenterProblem p({x}, GbwManifold(random_spd(rng, 4)));
  BarycenterResult r = barycenter(p);
  CHECK(r.converged);
  CHECK((r.point.matrix() - x.matrix()).norm() <= 1e-10 * x.matrix().norm());
}

TEST_CASE("scalar barycenter is the squared weighted mean of roots") {
  for (double m : {0.5, 1.0, 3.0}) {
    BarycenterProblem p({scalar(4), scalar(16)}, GbwManifold(scalar(m)));
    BarycenterResult r = barycenter(p);
    CHECK(r.point(0, 0) == doctest::Approx(9.0).epsilon(1e-14));
  }
  BarycenterProblem p({scalar(1), scalar(4), scalar(9)}, weights({0.2, 0.3, 0.5}), GbwManifold(scalar(2)));
  double expect = std::pow(0.2 * 1 + 0.3 * 2 + 0.5 * 3, 2);
  CHECK(barycenter(p).point(0, 0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("two-point equal-weight barycenter is the geodesic midpoint") {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    GbwManifold man(random_spd(rng, 3, 0.3, 3.0));
    SpdMatrix x = random_spd(rng, 3), y = random_spd(rng, 3);
    BarycenterResult r = barycenter(BarycenterProblem({x, y}, man));
    Matrix mid = man.geodesic(x, y).eval(0.5).matrix();
    CHECK((r.point.matrix() - mid).norm() <= 1e-8 * mid.norm());
  }
}

TEST_CASE("barycenter: optimality residual, monotone objective, trace lengths") {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 2 + t % 4;
    GbwManifold man(random_spd(rng, n, 0.3, 3.0));
    std::vector<SpdMatrix> xs;
    for (int i = 0; i < 6; ++i) xs.push_back(random_spd(rng, n));
    Vector w = Vector::NullaryExpr(6, [&](Eigen::Index) { return uniform(rng, 0.1, 1.0); });
    w /= w.sum();
    BarycenterProblem p(xs, w, man);
    BarycenterResult r = barycenter(p);
    CHECK(r.converged);
    CHECK(r.residual <= 1e-8 * r.point.matrix().norm());
    CHECK(p.optimality_residual(r.point).norm() == doctest::Approx(r.residual));
    for (size_t i = 1; i < r.objective.size(); ++i)
      CHECK(r.objective[i] <= r.objective[i - 1] + 1e-12 * std::abs(r.objective[i - 1]));
    CHECK(r.objective.size() == static_cast<size_t>(r.iterations) + 1);
    CHECK(r.change.size() == static_cast<size_t>(r.iterations));
    // a local perturbation does not lower the objective
    for (int k = 0; k < 5; ++k) {
      SpdMatrix q(sym_part(r.point.matrix() + 1e-3 * random_sym(rng, n).matrix()));
      CHECK(p.objective(q) >= p.objective(r.point) - 1e-12);
    }
  }
}

TEST_CASE("barycenter is a fixed point of its map and reduces to BW under whitening") {
  Rng rng(4);
  SpdMatrix m = random_spd(rng, 3, 0.3, 3.0);
  GbwManifold man(m);
  std::vector<SpdMatrix> xs, ws;
  Matrix mis = m.invsqrt().matrix();
  for (int i = 0; i < 4; ++i) {
    xs.push_back(random_spd(rng, 3));
    ws.emplace_back(sym_part(mis * xs.back().matrix() * mis));
  }
  BarycenterResult r = barycenter(BarycenterProblem(xs, man));
  BarycenterProblem p(xs, man);
  CHECK((p.fixed_point_map(r.point).matrix() - r.point.matrix()).norm() <= 1e-9 * r.point.matrix().norm());
  BarycenterResult rw = barycenter(BarycenterProblem(ws, GbwManifold::bures_wasserstein(3)));
  Matrix back = m.sqrt().matrix() * rw.point.matrix() * m.sqrt().matrix();
  CHECK((back - r.point.matrix()).norm() <= 1e-8 * back.norm());
}

TEST_CASE("barycenter validation and iteration cap") {
  Rng rng(5);
  SpdMatrix a = random_spd(rng, 2), b = random_spd(rng, 2);
  GbwManifold man = GbwManifold::bures_wasserstein(2);
  CHECK_THROWS(BarycenterProblem({a, b}, weights({0.5, 0.6}), man));
  CHECK_THROWS(BarycenterProblem({a, b}, weights({1.5, -0.5}), man));
  CHECK_THROWS(BarycenterProblem({}, man));
  CHECK_THROWS(BarycenterProblem({a, random_spd(rng, 3)}, man));
  BarycenterOptions o;
  o.max_iters = 1;
  o.tol = 1e-300;
  BarycenterResult r = barycenter(BarycenterProblem({a, b, random_spd(rng, 2)}, man), o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  BarycenterOptions init;
  init.init = a;
  CHECK(barycenter(BarycenterProblem({a, b}, man), init).objective.front() ==
        doctest::Approx(0.5 * man.distance_squared(a, b)));
}

TEST_CASE("barycenter result serializes") {
  Rng rng(6);
  BarycenterResult r = barycenter(BarycenterProblem({random_spd(rng, 2), random_spd(rng, 2)},
                                                    GbwManifold::bures_wasserstein(2)));
  auto j = r.to_json();
  CHECK(j["converged"].get<bool>() == r.converged);
  CHECK(j["objective"].size() == r.objective.size());
  CHECK(j.contains("point"));
}
