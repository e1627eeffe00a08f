#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cofactor/numerics.hpp"
#include "cofactor/rng.hpp"

using namespace cofactor;

TEST_CASE("trimmed mean hand cases") {
  Eigen::VectorXd constant(3);
  constant << 5, 5, 5;
  CHECK(trimmed_mean(constant) == 5.0);

  Eigen::VectorXd pair(2);
  pair << -1, 1;
  CHECK(trimmed_mean(pair) == doctest::Approx(0.0));

  // mean 20, sd sqrt(2000) ~ 44.72: the four zeros survive, the spike fails.
  Eigen::VectorXd spiky(5);
  spiky << 0, 0, 0, 0, 100;
  CHECK(trimmed_mean(spiky, TrimConstant{1.0}) == doctest::Approx(0.0));
}

TEST_CASE("trimmed mean limits and equivariance") {
  Rng rng(17);
  Eigen::VectorXd x(40);
  for (int i = 0; i < 40; ++i) x(i) = rng.normal() * 3 + 1;

  CHECK(trimmed_mean(x, TrimConstant{1e6}) == doctest::Approx(x.mean()).epsilon(1e-12));

  const double base = trimmed_mean(x);
  Eigen::VectorXd shifted = x.array() + 7.5;
  CHECK(trimmed_mean(shifted) == doctest::Approx(base + 7.5).epsilon(1e-12));
}

TEST_CASE("trimmed mean edge handling") {
  CHECK_THROWS_AS(trimmed_mean(Eigen::VectorXd()), InvalidInput);
  CHECK_THROWS_AS(trimmed_mean(Eigen::VectorXd::Ones(3), TrimConstant{-1}),
                  InvalidInput);

  // c tiny enough that no point lies within the band: fall back with warning.
  Eigen::VectorXd two(2);
  two << 0, 1;  // mean 0.5, sd ~0.707; band at c=0.1 is 0.0707
  bool fell_back = false;
  const double v = trimmed_mean(two, TrimConstant{0.1}, &fell_back);
  CHECK(v == doctest::Approx(0.5));
  CHECK(fell_back);
}

TEST_CASE("weighted least squares hand cases") {
  Eigen::MatrixXd ones(2, 1);
  ones << 1, 1;
  Eigen::VectorXd y(2), w(2);

  y << 1, 3;
  w << 1, 1;
  CHECK(weighted_least_squares(ones, y, w)(0) == doctest::Approx(2.0));

  y << 0, 3;
  w << 2, 1;
  CHECK(weighted_least_squares(ones, y, w)(0) == doctest::Approx(1.0));

  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  y << 1, 2;
  w << 0.3, 5.0;
  const Eigen::VectorXd b = weighted_least_squares(x, y, w);
  CHECK(b(0) == doctest::Approx(1.0));
  CHECK((y - x * b).norm() == doctest::Approx(0.0));
}

TEST_CASE("equal-weight WLS matches brute-force normal equations") {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd x(10, 3);
    Eigen::VectorXd y(10);
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 3; ++c) x(r, c) = rng.normal();
      y(r) = rng.normal();
    }
    const Eigen::VectorXd ref =
        (x.transpose() * x).ldlt().solve(x.transpose() * y);
    const Eigen::VectorXd got =
        weighted_least_squares(x, y, Eigen::VectorXd::Ones(10));
    CHECK((got - ref).norm() <= 1e-8 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("WLS rejects rank-deficient designs") {
  Eigen::MatrixXd x(4, 2);
  x.col(0) << 1, 1, 1, 1;
  x.col(1) << 2, 2, 2, 2;  // collinear with the intercept
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(4, 0, 3);
  CHECK_THROWS_AS(
      weighted_least_squares(x, y, Eigen::VectorXd::Ones(4)), SingularDesign);
}

TEST_CASE("error propagation") {
  Eigen::VectorXd g(2), s(2);
  g << 1, 1;
  s << 3, 4;
  CHECK(propagate_error(g, s) == doctest::Approx(5.0));

  g << 2, 0;
  CHECK(propagate_error(g, s) == doctest::Approx(6.0));

  g << 0, 0;
  CHECK(propagate_error(g, s) == 0.0);

  // absolute homogeneity in the sigmas
  g << 1.3, -0.4;
  s << 0.2, 2.5;
  const double base = propagate_error(g, s);
  CHECK(propagate_error(g, 3.5 * s) == doctest::Approx(3.5 * base).epsilon(1e-12));

  Eigen::VectorXd wrong(3);
  wrong.setOnes();
  CHECK_THROWS_AS(propagate_error(g, wrong), InvalidInput);
}
