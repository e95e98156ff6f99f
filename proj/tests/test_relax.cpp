#include "doctest.h"

#include "test_oracles.hpp"
#include "trsqp/oracle.hpp"
#include "trsqp/relax.hpp"

using namespace trsqp;

TEST_CASE("split_radius: 3-4-5 proportions") {
  const auto split = split_radius<double>(10.0, 3.0, 4.0);
  CHECK(split.delta_feas == doctest::Approx(6.0));
  CHECK(split.delta_opt == doctest::Approx(8.0));
  CHECK(split.delta == 10.0);
}

TEST_CASE("split_radius: degenerate residual components") {
  const auto pure_opt = split_radius<double>(2.0, 0.0, 0.7);
  CHECK(pure_opt.delta_feas == 0.0);
  CHECK(pure_opt.delta_opt == doctest::Approx(2.0));

  const auto pure_feas = split_radius<double>(2.0, 0.7, 0.0);
  CHECK(pure_feas.delta_feas == doctest::Approx(2.0));
  CHECK(pure_feas.delta_opt == 0.0);

  CHECK_THROWS_AS(split_radius<double>(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("split_radius: Pythagorean identity and homogeneity") {
  RngStream rng(601, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const double delta = 0.01 + std::abs(rng.normal());
    const double feas = std::abs(rng.normal());
    const double opt = std::abs(rng.normal()) + 1e-9;
    const auto s = split_radius<double>(delta, feas, opt);
    CHECK(s.delta_feas * s.delta_feas + s.delta_opt * s.delta_opt ==
          doctest::Approx(delta * delta).epsilon(1e-12));
    const auto s2 = split_radius<double>(2 * delta, feas, opt);
    CHECK(s2.delta_feas == doctest::Approx(2 * s.delta_feas).epsilon(1e-14));
    CHECK(s2.delta_opt == doctest::Approx(2 * s.delta_opt).epsilon(1e-14));
  }
}

TEST_CASE("relaxation_factor: clamp behavior") {
  CHECK(relaxation_factor<double>(1.0, 2.0) == doctest::Approx(0.5));
  CHECK(relaxation_factor<double>(5.0, 2.0) == 1.0);
  CHECK(relaxation_factor<double>(0.0, 2.0) == 0.0);
}

TEST_CASE("assemble_step: pure tangential boundary step when feasible") {
  // c = 0, B = 0, g in ker(G): dx = -delta_opt * g/||g||.
  Matrix G(1, 2);
  G << 1, 0;
  const auto fac = factorize<double>(G);
  Vector g(2);
  g << 0, 4;
  const Matrix B = Matrix::Zero(2, 2);
  const auto split = split_radius<double>(0.5, 0.0, 4.0);
  const auto step = assemble_step<double>(fac, g, Vector::Zero(1), B, split, TrsMethod::exact, 0.0);
  CHECK(step.gamma == 1.0);
  CHECK(step.normal.norm() == 0.0);
  CHECK(step.trial(0) == doctest::Approx(0.0));
  CHECK(step.trial(1) == doctest::Approx(-0.5));
}

TEST_CASE("assemble_step: full relaxed feasibility step when the normal fits") {
  // P g = 0, c != 0, delta_feas >= ||v||: gamma = 1 and ||c + G dx|| = 0.
  Matrix G(1, 2);
  G << 1, 0;
  const auto fac = factorize<double>(G);
  Vector g(2);
  g << 3, 0;  // entirely in im(G')
  Vector c(1);
  c << 2;
  const Matrix B = Matrix::Identity(2, 2);
  const auto split = split_radius<double>(4.0, 2.0, 1e-14);
  const auto step = assemble_step<double>(fac, g, c, B, split, TrsMethod::exact, 1.0);
  CHECK(step.gamma == 1.0);
  CHECK(step.trial(0) == doctest::Approx(-2.0));
  CHECK(step.linearized_feas <= 1e-12);
}

TEST_CASE("assemble_step: decomposition invariants on random instances") {
  RngStream rng(602, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 12, m = 5;
    const Matrix G = oracles::random_full_rank(rng, m, d);
    const auto fac = factorize<double>(G);
    const Vector g = oracles::random_vector(rng, d);
    const Vector c = oracles::random_vector(rng, m);
    const Matrix B = oracles::random_symmetric(rng, d);
    const double norm_B = Eigen::SelfAdjointEigenSolver<Matrix>(B, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .cwiseAbs()
                              .maxCoeff();
    const Vector pg = project_null<double>(fac, g);
    const double feas = c.norm();
    const double opt = pg.norm();
    const double delta = 0.05 + 0.5 * std::abs(rng.normal());
    const auto split = split_radius<double>(delta, feas, opt);
    const auto step = assemble_step<double>(fac, g, c, B, split, TrsMethod::exact, norm_B);

    CHECK(step.gamma >= 0.0);
    CHECK(step.gamma <= 1.0);
    const double dn = step.trial.norm();
    CHECK(dn <= delta * (1 + 1e-10));
    CHECK(step.normal.norm() <= split.delta_feas * (1 + 1e-10));
    CHECK(step.tangential.norm() <= split.delta_opt * (1 + 1e-10));
    // orthogonal decomposition
    CHECK(std::abs(dn * dn - step.normal.squaredNorm() - step.tangential.squaredNorm()) <=
          1e-10 * std::max(1e-30, dn * dn));
    // exact linearized feasibility reduction
    CHECK(std::abs(step.linearized_feas - (1 - step.gamma) * feas) <= 1e-10 * feas);
    // reduction bound on the tangential model
    CHECK(step.tangent.model_reduction <=
          -opt * split.delta_opt + 0.5 * norm_B * split.delta_opt * split.delta_opt +
              1e-10 * (1 + std::abs(step.tangent.model_reduction)));
    // gamma = 1 whenever the whole normal direction fits
    const Vector v = normal_direction<double>(fac, c);
    if (v.norm() <= split.delta_feas) CHECK(step.gamma == 1.0);
  }
}

TEST_CASE("assemble_step: tangential part stays in ker(G)") {
  RngStream rng(603, 0);
  const Matrix G = oracles::random_full_rank(rng, 3, 9);
  const auto fac = factorize<double>(G);
  const Vector g = oracles::random_vector(rng, 9);
  const Vector c = oracles::random_vector(rng, 3);
  const Matrix B = oracles::random_symmetric(rng, 9);
  const auto split = split_radius<double>(1.0, c.norm(), project_null<double>(fac, g).norm());
  const auto step = assemble_step<double>(fac, g, c, B, split, TrsMethod::exact, B.norm());
  CHECK((G * step.tangential).norm() <= 1e-10 * std::max(1.0, step.tangent.u.norm()));
}
