#include "doctest.h"

#include "test_oracles.hpp"
#include "trsqp/hessian.hpp"
#include "trsqp/oracle.hpp"

using namespace trsqp;

TEST_CASE("sr1_update: zero correction is skipped") {
  const Matrix H = 2 * Matrix::Identity(3, 3);
  Vector dx(3);
  dx << 1, 0, 0;
  const Vector y = H * dx;  // r = 0
  bool skipped = false;
  const Matrix out = sr1_update(H, dx, y, &skipped);
  CHECK(skipped);
  CHECK((out - H).norm() == 0.0);
}

TEST_CASE("sr1_update: one-step secant example") {
  const Matrix H = Matrix::Identity(2, 2);
  Vector dx(2), y(2);
  dx << 1, 0;
  y << 2, 0;
  const Matrix out = sr1_update(H, dx, y);
  CHECK(out(0, 0) == doctest::Approx(2.0));
  CHECK(out(1, 1) == doctest::Approx(1.0));
  CHECK(out(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("sr1_update: secant condition after accepted updates") {
  RngStream rng(801, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 5;
    Matrix H = Matrix::Identity(d, d);
    const Vector dx = oracles::random_vector(rng, d);
    const Vector y = oracles::random_vector(rng, d);
    bool skipped = false;
    H = sr1_update(H, dx, y, &skipped);
    if (!skipped) {
      CHECK((H * dx - y).norm() <= 1e-8 * std::max(1.0, y.norm()));
    }
    CHECK((H - H.transpose()).norm() <= 1e-12 * std::max(1.0, H.norm()));
  }
}

TEST_CASE("sr1_update: secant pairs from an SPD target shrink the error") {
  RngStream rng(802, 0);
  const Index d = 6;
  const Matrix M = oracles::random_matrix(rng, d, d);
  const Matrix target = M * M.transpose() + Matrix::Identity(d, d);
  Matrix H = Matrix::Identity(d, d);
  const double err0 = (H - target).norm();
  double err = err0;
  for (int k = 0; k < 20; ++k) {
    const Vector dx = oracles::random_vector(rng, d);
    H = sr1_update(H, dx, target * dx);
    err = (H - target).norm();
  }
  CHECK(err < 0.5 * err0);  // monitored trend, not a fixed rate
}

TEST_CASE("HessianStrategy: identity strategy and k=0 across kinds") {
  for (HessianKind kind : {HessianKind::Id, HessianKind::SR1, HessianKind::EstH, HessianKind::AveH}) {
    HessianStrategy strat(kind, 3);
    const Matrix B0 = strat.produce(0);
    CHECK((B0 - Matrix::Identity(3, 3)).norm() == 0.0);
  }
  HessianStrategy id(HessianKind::Id, 3);
  id.produce(0);
  id.record(0, Vector::Zero(3), Vector::Zero(3));
  CHECK((id.produce(1) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("HessianStrategy: SR1 serves H_{k-1}") {
  RngStream rng(803, 0);
  HessianStrategy strat(HessianKind::SR1, 2);
  const Vector x0 = Vector::Zero(2);
  Vector g0(2);
  g0 << 1, 1;
  strat.produce(0);
  strat.record(0, x0, g0);
  // B_1 = H_0 = I regardless of the first record
  CHECK((strat.produce(1) - Matrix::Identity(2, 2)).norm() == 0.0);
  Vector x1(2), g1(2);
  x1 << 1, 0;
  g1 << 3, 1;  // dx = (1,0), y = (2,0) -> H_1 = diag(2,1)
  strat.record(1, x1, g1);
  const Matrix B2 = strat.produce(2);
  CHECK(B2(0, 0) == doctest::Approx(2.0));
  CHECK(B2(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("HessianStrategy: EstH serves the previous sample") {
  RngStream rng(804, 0);
  HessianStrategy strat(HessianKind::EstH, 3);
  const Matrix A0 = oracles::random_symmetric(rng, 3);
  strat.produce(0);
  strat.record(0, Vector::Zero(3), Vector::Zero(3), A0);
  CHECK((strat.produce(1) - A0).norm() == 0.0);
  const Matrix A1 = oracles::random_symmetric(rng, 3);
  strat.record(1, Vector::Zero(3), Vector::Zero(3), A1);
  CHECK((strat.produce(2) - A1).norm() == 0.0);
}

TEST_CASE("HessianStrategy: AveH growing-window mean") {
  RngStream rng(805, 0);
  HessianStrategy strat(HessianKind::AveH, 2);
  std::vector<Matrix> samples;
  for (long k = 0; k < 3; ++k) {
    strat.produce(k);
    samples.push_back(oracles::random_symmetric(rng, 2));
    strat.record(k, Vector::Zero(2), Vector::Zero(2), samples.back());
  }
  const Matrix B3 = strat.produce(3);
  const Matrix mean = (samples[0] + samples[1] + samples[2]) / 3.0;
  CHECK((B3 - mean).norm() <= 1e-14 * std::max(1.0, mean.norm()));
}

TEST_CASE("HessianStrategy: AveH ring buffer equals brute-force window mean") {
  RngStream rng(806, 0);
  const Index window = 100;
  HessianStrategy strat(HessianKind::AveH, 2, window);
  std::vector<Matrix> samples;
  const long total = 257;
  for (long k = 0; k < total; ++k) {
    strat.produce(k);
    samples.push_back(oracles::random_symmetric(rng, 2));
    strat.record(k, Vector::Zero(2), Vector::Zero(2), samples.back());
  }
  Matrix brute = Matrix::Zero(2, 2);
  for (long k = total - window; k < total; ++k) brute += samples[static_cast<size_t>(k)];
  brute /= double(window);
  const Matrix produced = strat.produce(total);
  CHECK((produced - brute).norm() <= 1e-12 * std::max(1.0, brute.norm()));
}

TEST_CASE("HessianStrategy: produced matrices are symmetric") {
  RngStream rng(807, 0);
  HessianStrategy strat(HessianKind::AveH, 4);
  for (long k = 0; k < 50; ++k) {
    const Matrix B = strat.produce(k);
    CHECK((B - B.transpose()).norm() <= 1e-12 * std::max(1.0, B.norm()));
    strat.record(k, Vector::Zero(4), Vector::Zero(4), oracles::random_symmetric(rng, 4));
  }
}

TEST_CASE("HessianStrategy: call-order violations are rejected") {
  HessianStrategy strat(HessianKind::Id, 2);
  CHECK_THROWS_AS(strat.record(0, Vector::Zero(2), Vector::Zero(2)), std::logic_error);
  strat.produce(0);
  CHECK_THROWS_AS(strat.produce(1), std::logic_error);  // record(0) missing
  strat.record(0, Vector::Zero(2), Vector::Zero(2));
  CHECK_THROWS_AS(strat.produce(0), std::logic_error);  // k must advance
  CHECK_THROWS_AS(strat.record(1, Vector::Zero(2), Vector::Zero(2)), std::logic_error);
}

TEST_CASE("HessianStrategy: EstH/AveH demand a sampled Hessian") {
  HessianStrategy strat(HessianKind::EstH, 2);
  strat.produce(0);
  CHECK_THROWS_AS(strat.record(0, Vector::Zero(2), Vector::Zero(2)), std::logic_error);
}
