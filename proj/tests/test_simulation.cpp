#include <doctest.h>

#include <cmath>

#include "cofactor/numerics.hpp"
#include "cofactor/simulation.hpp"

using namespace cofactor;

TEST_CASE("generate_uncontaminated") {
  ScenarioConfig cfg;

  SUBCASE("deterministic given the seed") {
    const SignalMatrix a = generate_uncontaminated(123, cfg);
    const SignalMatrix b = generate_uncontaminated(123, cfg);
    CHECK(a.values() == b.values());
  }
  SUBCASE("zero noise is rejected at construction") {
    cfg.noise_sd = 0;
    CHECK_THROWS_AS(generate_uncontaminated(1, cfg), InvalidInput);
  }
  SUBCASE("column means land near the targets") {
    int ok = 0;
    const int reps = 200;
    for (int s = 0; s < reps; ++s) {
      const SignalMatrix m = generate_uncontaminated(5000 + std::uint64_t(s), cfg);
      const Eigen::VectorXd mean = m.values().colwise().mean();
      if (std::abs(mean(0) - 1) <= 0.4 && std::abs(mean(1) - 5) <= 0.4 &&
          std::abs(mean(2) - 10) <= 0.4)
        ++ok;
    }
    CHECK(double(ok) >= 0.99 * reps);
  }
}

TEST_CASE("generate_common_factor") {
  FactorSpec spec;

  SUBCASE("null spec yields zeros") {
    spec.walk_sd = 0;
    spec.num_spikes = 0;
    const Eigen::VectorXd f = generate_common_factor(9, 50, spec);
    CHECK(f.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("trimmed mean is zero by construction") {
    const Eigen::VectorXd f = generate_common_factor(10, 100, spec);
    CHECK(std::abs(trimmed_mean(f)) <= 1e-10);
  }
  SUBCASE("walk component is rescaled near unit sd") {
    spec.num_spikes = 0;
    for (std::uint64_t s = 20; s < 30; ++s) {
      const Eigen::VectorXd f = generate_common_factor(s, 100, spec);
      const double mean = f.mean();
      const double sd = std::sqrt((f.array() - mean).square().sum() / 99.0);
      CHECK(sd > 0.9);
      CHECK(sd < 1.1);
    }
  }
}

TEST_CASE("contaminate") {
  ScenarioConfig cfg;
  const SignalMatrix m = generate_uncontaminated(77, cfg);

  SUBCASE("constant factor shifts columns by the loadings") {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cfg.n);
    const SignalMatrix c = contaminate(m, ones, {1, 1.5, 2});
    CHECK((c.values().col(0) - m.values().col(0) -
           Eigen::VectorXd::Ones(cfg.n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((c.values().col(2) - m.values().col(2) -
           2 * Eigen::VectorXd::Ones(cfg.n)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(contaminate(m, Eigen::VectorXd::Ones(10), {1, 1.5, 2}),
                    InvalidInput);
    CHECK_THROWS_AS(contaminate(m, Eigen::VectorXd::Ones(cfg.n), {1, 2}),
                    InvalidInput);
  }
  SUBCASE("cleaning with the true factor recovers the input") {
    const Eigen::VectorXd f = generate_common_factor(78, cfg.n, cfg.factor_spec);
    const SignalMatrix c = contaminate(m, f, {1, 1.5, 2});
    Eigen::MatrixXd recovered = c.values();
    const double loadings[3] = {1, 1.5, 2};
    for (int i = 0; i < 3; ++i) recovered.col(i) -= loadings[i] * f;
    CHECK((recovered - m.values()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("run_replication_study smoke and determinism") {
  ScenarioConfig cfg;
  cfg.replications = 8;
  cfg.base_seed = 321;

  const ReplicationSummary a = run_replication_study(cfg, 2);
  REQUIRE(a.by_method.count("common_factor") == 1);
  for (const auto& [method, dists] : a.by_method) {
    REQUIRE(dists.size() == 3);
    for (const auto& d : dists) {
      CHECK(d.means.size() == 8);
      for (double x : d.means) CHECK(std::isfinite(x));
      for (double x : d.sd_of_means) CHECK(std::isfinite(x));
    }
  }

  // parallel and serial runs agree bit-for-bit
  const ReplicationSummary b = run_replication_study(cfg, 1);
  for (const auto& [method, dists] : a.by_method)
    for (size_t i = 0; i < dists.size(); ++i) {
      CHECK(dists[i].means == b.by_method.at(method)[i].means);
      CHECK(dists[i].sd_of_means == b.by_method.at(method)[i].sd_of_means);
    }
}

TEST_CASE("replications = 1 produces unit-length summaries") {
  ScenarioConfig cfg;
  cfg.replications = 1;
  const ReplicationSummary s = run_replication_study(cfg, 1);
  for (const auto& [method, dists] : s.by_method)
    for (const auto& d : dists) CHECK(d.means.size() == 1);
}
