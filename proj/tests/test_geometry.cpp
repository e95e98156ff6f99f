#include "doctest.h"

#include "test_oracles.hpp"
#include "trsqp/geometry.hpp"
#include "trsqp/oracle.hpp"

using namespace trsqp;

namespace {
Matrix row2(double a, double b) {
  Matrix G(1, 2);
  G << a, b;
  return G;
}
}  // namespace

TEST_CASE("factorize: diagonal and trivial Gram matrices") {
  const auto fac = factorize<double>(row2(1, 0));
  CHECK(fac.gram_chol.matrixL()(0, 0) == doctest::Approx(1.0));

  Matrix G(2, 3);
  G << 1, 0, 0, 0, 2, 0;
  const auto fac2 = factorize<double>(G);
  CHECK(fac2.gram_chol.matrixL()(0, 0) == doctest::Approx(1.0));
  CHECK(fac2.gram_chol.matrixL()(1, 1) == doctest::Approx(2.0));
  CHECK(fac2.norm_G() == doctest::Approx(2.0));
}

TEST_CASE("factorize: rank-deficient Jacobian fails fast") {
  Matrix G(2, 3);
  G << 1, 1, 0, 1, 1, 0;
  CHECK_THROWS_AS(factorize<double>(G), RankDeficiencyError);
  CHECK_THROWS_AS(factorize<double>(Matrix::Zero(1, 2)), RankDeficiencyError);
  // m >= d is a contract violation, not rank deficiency
  CHECK_THROWS_AS(factorize<double>(Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("factorize: Cholesky reproduces the Gram matrix") {
  RngStream rng(301, 0);
  const Matrix G = oracles::random_full_rank(rng, 4, 9);
  const auto fac = factorize<double>(G);
  const Matrix L = fac.gram_chol.matrixL();
  CHECK(((L * L.transpose()) - G * G.transpose()).norm() <=
        1e-10 * (G * G.transpose()).norm());
  CHECK(fac.condition_estimate >= 1.0);
}

TEST_CASE("project_null: hand examples") {
  const auto fac = factorize<double>(row2(1, 0));
  Vector y(2);
  y << 3, 4;
  const Vector py = project_null<double>(fac, y);
  CHECK(py(0) == doctest::Approx(0.0));
  CHECK(py(1) == doctest::Approx(4.0));

  Vector in_kernel(2);
  in_kernel << 0, 7;
  CHECK((project_null<double>(fac, in_kernel) - in_kernel).norm() <= 1e-14);
}

TEST_CASE("project_null: idempotent, annihilated by G, non-expansive") {
  RngStream rng(302, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix G = oracles::random_full_rank(rng, 5, 12);
    const auto fac = factorize<double>(G);
    const Vector y = oracles::random_vector(rng, 12);
    const Vector py = project_null<double>(fac, y);
    CHECK((G * py).norm() <= 1e-10 * std::max(1.0, y.norm()));
    CHECK((project_null<double>(fac, py) - py).norm() <= 1e-10 * std::max(1.0, y.norm()));
    CHECK(py.norm() <= y.norm() * (1 + 1e-12));
  }
}

TEST_CASE("normal_direction: hand examples and linearized feasibility") {
  const auto fac = factorize<double>(row2(1, 0));
  Vector c(1);
  c << 2;
  const Vector v = normal_direction<double>(fac, c);
  CHECK(v(0) == doctest::Approx(-2.0));
  CHECK(v(1) == doctest::Approx(0.0));
  CHECK(normal_direction<double>(fac, Vector::Zero(1)).norm() == 0.0);

  RngStream rng(303, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix G = oracles::random_full_rank(rng, 3, 8);
    const auto f = factorize<double>(G);
    const Vector cc = oracles::random_vector(rng, 3);
    const Vector vv = normal_direction<double>(f, cc);
    CHECK((G * vv + cc).norm() <= 1e-10 * cc.norm());
  }
}

TEST_CASE("ls_multiplier: projection identity P g = g + G'lambda") {
  const auto fac = factorize<double>(row2(1, 0));
  Vector g(2);
  g << 3, 4;
  const Vector lambda = ls_multiplier<double>(fac, g);
  CHECK(lambda(0) == doctest::Approx(-3.0));
  const Vector grad_lag = g + fac.G.transpose() * lambda;
  CHECK((grad_lag - project_null<double>(fac, g)).norm() <= 1e-14);

  Vector in_kernel(2);
  in_kernel << 0, 5;
  CHECK(ls_multiplier<double>(fac, in_kernel).norm() <= 1e-14);

  RngStream rng(304, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix G = oracles::random_full_rank(rng, 4, 10);
    const auto f = factorize<double>(G);
    const Vector gg = oracles::random_vector(rng, 10);
    const Vector lam = ls_multiplier<double>(f, gg);
    CHECK((project_null<double>(f, gg) - (gg + G.transpose() * lam)).norm() <=
          1e-10 * std::max(1.0, gg.norm()));
  }
}

TEST_CASE("normal and projected directions are orthogonal") {
  RngStream rng(305, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix G = oracles::random_full_rank(rng, 4, 9);
    const auto fac = factorize<double>(G);
    const Vector c = oracles::random_vector(rng, 4);
    const Vector y = oracles::random_vector(rng, 9);
    const Vector v = normal_direction<double>(fac, c);
    const Vector py = project_null<double>(fac, y);
    CHECK(std::abs(v.dot(py)) <= 1e-10 * std::max(1.0, v.norm() * py.norm()));
  }
}

TEST_CASE("cached factorization matches a fresh dense solve") {
  RngStream rng(306, 0);
  const Matrix G = oracles::random_full_rank(rng, 5, 11);
  const auto fac = factorize<double>(G);
  const Vector c = oracles::random_vector(rng, 5);
  const Vector via_factor = normal_direction<double>(fac, c);
  const Matrix gram = G * G.transpose();
  const Vector fresh = -G.transpose() * gram.fullPivLu().solve(c);
  CHECK((via_factor - fresh).norm() <= 1e-12 * std::max(1.0, fresh.norm()));
}

TEST_CASE("projected_hessian: symmetric and matches explicit P B P") {
  RngStream rng(307, 0);
  const Matrix G = oracles::random_full_rank(rng, 3, 7);
  const auto fac = factorize<double>(G);
  const Matrix B = oracles::random_symmetric(rng, 7);
  const Matrix pbp = projected_hessian<double>(fac, B);
  CHECK((pbp - pbp.transpose()).norm() == 0.0);
  const Matrix P =
      Matrix::Identity(7, 7) - G.transpose() * (G * G.transpose()).fullPivLu().solve(G);
  CHECK((pbp - P * B * P).norm() <= 1e-10 * std::max(1.0, B.norm()));
}
