#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbw/lyapunov.hpp"
#include "gbw/matrix_io.hpp"
#include "gbw/random.hpp"
#include "gbw/spd.hpp"
#include "support/oracles.hpp"

using namespace gbw;

namespace {
Matrix diag(std::initializer_list<double> v) {
  Vector d(v.size());
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}
Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

TEST_CASE("sym_eig of a diagonal matrix") {
  EigPair e = sym_eig(SymMatrix(diag({4, 1})));
  CHECK(e.values(0) == doctest::Approx(4.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK((e.vectors.cwiseAbs() - Matrix::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("sym_eig of the identity") {
  EigPair e = sym_eig(SymMatrix::identity(3));
  CHECK((e.values - Vector::Ones(3)).norm() < 1e-15);
}

TEST_CASE("sym_eig of [[2,1],[1,2]] sorts descending") {
  EigPair e = sym_eig(SymMatrix(mat2(2, 1, 1, 2)));
  CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  Vector v0 = e.vectors.col(0), v1 = e.vectors.col(1);
  CHECK(std::abs(std::abs(v0(0)) - 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(v0(0) * v0(1) > 0);  // (1,1)/√2 up to sign
  CHECK(v1(0) * v1(1) < 0);  // (1,−1)/√2 up to sign
}

TEST_CASE("eigen pairs reconstruct and are orthogonal") {
  Rng rng(11);
  for (int n : {1, 3, 10, 40}) {
    SymMatrix a = random_sym(rng, n);
    EigPair e = sym_eig(a);
    CHECK((e.vectors * e.vectors.transpose() - Matrix::Identity(n, n)).norm() < 1e-10);
    Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((rec - a.matrix()).norm() <= 1e-10 * a.norm());
    for (int i = 1; i < n; ++i) CHECK(e.values(i - 1) >= e.values(i));
  }
}

TEST_CASE("SymMatrix symmetrizes small drift and rejects asymmetric input") {
  Matrix a = mat2(1, 2, 2 + 1e-13, 3);
  SymMatrix s(a);
  CHECK(s(0, 1) == s(1, 0));
  CHECK_THROWS_AS(SymMatrix(mat2(1, 2, 3, 4)), NotSymmetricError);
  CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("SpdMatrix rejects indefinite, singular and non-finite input") {
  CHECK_THROWS_AS(SpdMatrix(diag({1, -1})), DegenerateInputError);
  CHECK_THROWS_AS(SpdMatrix(diag({1, 0})), DegenerateInputError);
  CHECK_THROWS_AS(SpdMatrix(diag({1, 1e-13})), DegenerateInputError);
  Matrix bad = diag({1, 1});
  bad(0, 0) = NAN;
  CHECK_THROWS(SpdMatrix{bad});
  CHECK_NOTHROW(SpdMatrix(diag({1, 1e-11})));
}

TEST_CASE("spd_sqrt examples") {
  CHECK((spd_sqrt(SpdMatrix(diag({4, 9}))).matrix() - diag({2, 3})).norm() < 1e-14);
  CHECK((spd_sqrt(SpdMatrix::identity(3)).matrix() - Matrix::Identity(3, 3)).norm() < 1e-15);
  SpdMatrix a(mat2(2, 1, 1, 2));
  Matrix r = spd_sqrt(a).matrix();
  CHECK((r * r - a.matrix()).norm() <= 1e-10 * a.matrix().norm());
  // Q diag(√3, 1) Qᵀ
  Matrix q = mat2(1, 1, 1, -1) / std::sqrt(2.0);
  CHECK((r - q * diag({std::sqrt(3.0), 1}) * q.transpose()).norm() < 1e-14);
}

TEST_CASE("spd_invsqrt and spd_inv") {
  Rng rng(5);
  SpdMatrix x = random_spd(rng, 6, 0.1, 10);
  Matrix is = spd_invsqrt(x).matrix();
  CHECK((is * x.matrix() * is - Matrix::Identity(6, 6)).norm() < 1e-10);
  CHECK((spd_inv(x).matrix() * x.matrix() - Matrix::Identity(6, 6)).norm() < 1e-10);
}

TEST_CASE("property: squaring the square root returns the input") {
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    int n = 1 + k % 12;
    SpdMatrix x = random_spd(rng, n, 1e-3, 1e3);
    Matrix r = spd_sqrt(x).matrix();
    CHECK((r * r - x.matrix()).norm() <= 1e-9 * x.matrix().norm());
  }
}

TEST_CASE("generalized Lyapunov: scalar and diagonal closed forms") {
  SymMatrix l1 = solve_gen_lyapunov(SpdMatrix(Matrix::Constant(1, 1, 3.0)),
                                    GbwParam(SpdMatrix(Matrix::Constant(1, 1, 2.0))),
                                    SymMatrix(Matrix::Constant(1, 1, 12.0)));
  CHECK(l1(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  SymMatrix l2 = solve_gen_lyapunov(SpdMatrix(diag({1, 2})), GbwParam::identity(2),
                                    SymMatrix(diag({4, 8})));
  CHECK((l2.matrix() - diag({2, 2})).norm() < 1e-14);
}

TEST_CASE("generalized Lyapunov with M = I matches the Kronecker system") {
  Rng rng(3);
  SpdMatrix x = random_spd(rng, 4);
  SymMatrix u = random_sym(rng, 4);
  SymMatrix l = solve_gen_lyapunov(x, GbwParam::identity(4), u);
  Matrix ref = oracle::kron_lyapunov(x.matrix(), Matrix::Identity(4, 4), u.matrix());
  CHECK((l.matrix() - ref).norm() <= 1e-10 * ref.norm());
}

TEST_CASE("generalized Lyapunov with general M matches the Kronecker system") {
  Rng rng(4);
  SpdMatrix x = random_spd(rng, 5, 0.2, 5);
  SpdMatrix m = random_spd(rng, 5, 0.2, 5);
  SymMatrix u = random_sym(rng, 5);
  SymMatrix l = solve_gen_lyapunov(x, GbwParam(m), u);
  Matrix ref = oracle::kron_lyapunov(x.matrix(), m.matrix(), u.matrix());
  CHECK((l.matrix() - ref).norm() <= 1e-10 * ref.norm());
}

TEST_CASE("property: Lyapunov residual, symmetry and pair symmetry") {
  Rng rng(21);
  for (int k = 0; k < 60; ++k) {
    int n = 1 + static_cast<int>(uniform(rng, 0, 50));
    SpdMatrix x = random_spd(rng, n, 0.1, 10);
    SpdMatrix m = random_spd(rng, n, 0.1, 10);
    SymMatrix u = random_sym(rng, n);
    SymMatrix l = solve_gen_lyapunov(x, GbwParam(m), u);
    Matrix r = x.matrix() * l.matrix() * m.matrix() + m.matrix() * l.matrix() * x.matrix() - u.matrix();
    CHECK(r.norm() <= 1e-10 * u.norm());
    CHECK(relative_asymmetry(l.matrix()) == 0.0);
    SymMatrix l_swapped = solve_gen_lyapunov(m, GbwParam(x), u);
    CHECK((l.matrix() - l_swapped.matrix()).norm() <= 1e-9 * l.norm());
  }
}

TEST_CASE("Lyapunov solve of a skew right-hand side is skew") {
  Rng rng(8);
  SpdMatrix x = random_spd(rng, 4);
  SpdMatrix m = random_spd(rng, 4);
  Matrix k = random_skew(rng, 4);
  Matrix l = GenLyapunov(x, m).solve_general(k);
  CHECK((l + l.transpose()).norm() < 1e-12);
  CHECK((x.matrix() * l * m.matrix() + m.matrix() * l * x.matrix() - k).norm() < 1e-10);
}

TEST_CASE("Lyapunov floor is configurable and reports a singular operator") {
  SpdMatrix x(diag({1, 1e-6}));
  CHECK_NOTHROW(GenLyapunov(x, SpdMatrix::identity(2)));
  CHECK_THROWS_AS(GenLyapunov(x, SpdMatrix::identity(2), 1e-4), SingularOperatorError);
  CHECK_THROWS_AS(GenLyapunov(x, SpdMatrix::identity(3)), DimensionError);
}

TEST_CASE("geometric mean examples") {
  SpdMatrix a(Matrix::Constant(1, 1, 4.0)), b(Matrix::Constant(1, 1, 9.0));
  CHECK(geometric_mean(a, b)(0, 0) == doctest::Approx(6.0).epsilon(1e-15));
  Rng rng(9);
  SpdMatrix c = random_spd(rng, 4);
  CHECK((geometric_mean(c, c).matrix() - c.matrix()).norm() < 1e-12);
  SpdMatrix p = random_spd(rng, 3), q = random_spd(rng, 3);
  Matrix g = geometric_mean(p, q).matrix();
  CHECK((g * p.inv().matrix() * g - q.matrix()).norm() < 1e-9);
}

TEST_CASE("property: geometric mean is symmetric in its arguments") {
  Rng rng(10);
  for (int k = 0; k < 50; ++k) {
    SpdMatrix a = random_spd(rng, 5, 0.1, 10), b = random_spd(rng, 5, 0.1, 10);
    CHECK((geometric_mean(a, b).matrix() - geometric_mean(b, a).matrix()).norm() < 1e-9);
  }
}

TEST_CASE("square root of a product agrees with the Schur square root") {
  Rng rng(12);
  SpdMatrix a = random_spd(rng, 5), b = random_spd(rng, 5);
  Matrix r = sqrt_of_product(a, b);
  Matrix ref = oracle::schur_sqrt(a.matrix() * b.matrix());
  CHECK((r - ref).norm() < 1e-10);
}

TEST_CASE("polar factor examples") {
  Rng rng(13);
  SpdMatrix s = random_spd(rng, 3);
  CHECK((polar_factor(s.matrix()) - Matrix::Identity(3, 3)).norm() < 1e-12);
  Matrix r = oracle::rotation(1.1);
  CHECK((polar_factor(r) - r).norm() < 1e-14);
  Matrix a = oracle::rotation(0.3) * diag({2, 5});
  CHECK((polar_factor(a) - oracle::rotation(0.3)).norm() < 1e-14);
  CHECK_THROWS_AS(polar_factor(diag({1, 0})), SingularInputError);
}

TEST_CASE("property: polar factor is orthogonal and maximizes the Procrustes trace") {
  Rng rng(14);
  for (int k = 0; k < 10; ++k) {
    Matrix a = gaussian_matrix(rng, 4, 4);
    Matrix o = polar_factor(a);
    CHECK((o.transpose() * o - Matrix::Identity(4, 4)).norm() < 1e-10);
    double best = (o.transpose() * a).trace();
    for (int j = 0; j < 200; ++j) {
      Matrix q = random_orthogonal(rng, 4);
      CHECK(best >= (q.transpose() * a).trace() - 1e-12);
    }
  }
}

TEST_CASE("loewner gap examples") {
  CHECK(loewner_gap(SymMatrix::identity(2), SymMatrix(2.0 * Matrix::Identity(2, 2))) ==
        doctest::Approx(1.0));
  Rng rng(15);
  SymMatrix a = random_sym(rng, 3);
  CHECK(std::abs(loewner_gap(a, a)) < 1e-15);
  CHECK(loewner_gap(SymMatrix(diag({1, 3})), SymMatrix(diag({2, 2}))) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(loewner_gap(SymMatrix::identity(2), SymMatrix::identity(3)), DimensionError);
}

TEST_CASE("GbwParam caches consistent powers") {
  Rng rng(16);
  GbwParam p(random_spd(rng, 5, 0.1, 10));
  const Matrix& m = p.m().matrix();
  CHECK((p.m_sqrt().matrix() * p.m_sqrt().matrix() - m).norm() <= 1e-10 * m.norm());
  CHECK((p.m_inv().matrix() * m - Matrix::Identity(5, 5)).norm() < 1e-10);
  CHECK((p.m_invsqrt().matrix() * p.m_sqrt().matrix() - Matrix::Identity(5, 5)).norm() < 1e-10);
}

TEST_CASE("matrix CSV and JSON round trips are exact") {
  Rng rng(17);
  Matrix a = gaussian_matrix(rng, 3, 3);
  CHECK(matrix_from_csv(matrix_to_csv(a)) == a);
  CHECK(matrix_from_json(matrix_to_json(a)) == a);
  CHECK_THROWS_AS(matrix_from_csv("1,2\n3\n"), IoError);
  CHECK_THROWS_AS(matrix_from_csv("1,x\n"), IoError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"dim", 2}, {"entries", {{1, 2}}}}), IoError);
}
