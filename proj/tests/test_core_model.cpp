#include <doctest.h>

#include <cmath>

#include "cofactor/types.hpp"
#include "helpers.hpp"

using namespace cofactor;
using cofactor::testutil::make_matrix;
using cofactor::testutil::noise_matrix;

TEST_CASE("SignalMatrix construction guards") {
  Eigen::MatrixXd v(2, 1);
  v << 1, 3;
  CHECK_NOTHROW(make_matrix(v));

  Eigen::MatrixXd constant(2, 1);
  constant << 5, 5;
  CHECK_THROWS_AS(make_matrix(constant), InvalidInput);

  Eigen::MatrixXd nan(2, 1);
  nan << 1, std::nan("");
  CHECK_THROWS_AS(make_matrix(nan), InvalidInput);

  // non-increasing times
  Eigen::VectorXd t(2);
  t << 1, 1;
  CHECK_THROWS_AS(SignalMatrix(t, v, {"a"}), InvalidInput);
}

TEST_CASE("column stats hand case") {
  Eigen::MatrixXd v(2, 1);
  v << 1, 3;
  const ColumnStats s = column_stats(make_matrix(v));
  CHECK(s.mean(0) == doctest::Approx(2.0));
  CHECK(s.sd(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.sd_of_mean(0) == doctest::Approx(1.0));
}

TEST_CASE("column stats sd-of-mean scale on N(5,1) draws") {
  // With n = 100 the standard error estimate should sit near 0.1.
  Rng rng(5);
  const SignalMatrix m = make_matrix(noise_matrix(rng, 100, 1, {5.0}));
  const ColumnStats s = column_stats(m);
  CHECK(s.sd_of_mean(0) > 0.05);
  CHECK(s.sd_of_mean(0) < 0.15);
}

namespace {

FactorModel model_of(const Eigen::MatrixXd& loadings,
                     const Eigen::VectorXd& means) {
  FactorModel m;
  m.loadings = loadings;
  m.base_means = means;
  m.noise_variances = Eigen::VectorXd::Ones(means.size());
  return m;
}

}  // namespace

TEST_CASE("residual SSE decompositions and hand case") {
  Eigen::MatrixXd v(2, 2);
  v << 1, 2, 3, 4;
  const SignalMatrix m = make_matrix(v);

  SUBCASE("K=0 with column means gives centered SSE") {
    const FactorModel k0 =
        model_of(Eigen::MatrixXd(2, 0), v.colwise().mean().transpose());
    const ResidualSse r = residual_sse(m, k0, FactorScores{Eigen::MatrixXd(2, 0)});
    CHECK(r.total == doctest::Approx(4.0));  // (n-1) var per column = 2 + 2
    CHECK(std::abs(r.per_time.sum() - r.per_signal.sum()) <= 1e-9 * r.total);
  }

  SUBCASE("exact one-factor construction has zero residual") {
    Eigen::MatrixXd b(2, 1);
    b << 1, 1;
    Eigen::VectorXd mu(2);
    mu << 2, 3;
    Eigen::MatrixXd f(2, 1);
    f << -1, 1;
    const ResidualSse r = residual_sse(m, model_of(b, mu), FactorScores{f});
    CHECK(r.total == doctest::Approx(0.0));
  }
}

TEST_CASE("residual SSE is invariant under loading/score rotations") {
  Rng rng(31);
  const Eigen::MatrixXd base = noise_matrix(rng, 30, 4, {0, 0, 0, 0});
  const SignalMatrix m = make_matrix(base);
  Eigen::MatrixXd b(4, 2), f(30, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) b(i, j) = rng.normal();
  for (int t = 0; t < 30; ++t)
    for (int j = 0; j < 2; ++j) f(t, j) = rng.normal();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(4);

  Eigen::Matrix2d a;
  a << 1.2, -0.3, 0.4, 0.9;  // invertible
  const Eigen::MatrixXd b2 = b * a;
  const Eigen::MatrixXd f2 = f * a.inverse().transpose();

  const double s1 = residual_sse(m, model_of(b, mu), FactorScores{f}).total;
  const double s2 = residual_sse(m, model_of(b2, mu), FactorScores{f2}).total;
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-9));
}
