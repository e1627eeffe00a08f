#include "cofactor/simulation.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "cofactor/numerics.hpp"
#include "cofactor/solver.hpp"

namespace cofactor {

void FactorSpec::validate() const {
  if (walk_sd < 0 || num_spikes < 0 || spike_magnitude < 0)
    throw InvalidInput("FactorSpec parameters must be non-negative");
}

void ScenarioConfig::validate() const {
  if (n < 4) throw InvalidInput("scenario n must be >= 4");
  if (true_means.size() != factor_loadings.size() || true_means.empty())
    throw InvalidInput("true_means and factor_loadings must have equal nonzero length");
  if (!(noise_sd > 0)) throw InvalidInput("noise_sd must be positive");
  if (replications < 1) throw InvalidInput("replications must be >= 1");
  if (!(fourier_cutoff > 0) || fourier_cutoff > 1)
    throw InvalidInput("fourier_cutoff must be in (0, 1]");
  if (kalman_mode == KalmanMode::kFixedRatio && !(kalman_psi > 0))
    throw InvalidInput("kalman_psi must be positive");
  if (kalman_mode == KalmanMode::kFixed) {
    KalmanLocalLevelParams p{kalman_r, kalman_q, false};
    p.validate();
  }
  factor_spec.validate();
}

namespace {

SignalMatrix draw_uncontaminated(Rng& rng, const ScenarioConfig& cfg) {
  const int n = cfg.n;
  const auto I = Eigen::Index(cfg.true_means.size());
  Eigen::MatrixXd values(n, I);
  for (Eigen::Index i = 0; i < I; ++i)
    for (int t = 0; t < n; ++t)
      values(t, i) = cfg.true_means[size_t(i)] + cfg.noise_sd * rng.normal();
  Eigen::VectorXd times =
      Eigen::VectorXd::LinSpaced(n, 0, double(n - 1));
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < I; ++i)
    names.push_back("signal" + std::to_string(i + 1));
  return SignalMatrix(std::move(times), std::move(values), std::move(names));
}

}  // namespace

SignalMatrix generate_uncontaminated(std::uint64_t seed, const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(seed);
  return draw_uncontaminated(rng, cfg);
}

Eigen::VectorXd generate_common_factor(Rng& rng, int n, const FactorSpec& spec) {
  spec.validate();
  if (n < 2) throw InvalidInput("factor length must be >= 2");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  if (spec.walk_sd > 0) {
    double level = 0;
    for (int t = 0; t < n; ++t) {
      level += spec.walk_sd * rng.normal();
      f(t) = level;
    }
    const double mean = f.mean();
    const double sd = std::sqrt((f.array() - mean).square().sum() / double(n - 1));
    if (sd > 0) f /= sd;
  }
  for (int s = 0; s < spec.num_spikes; ++s)
    f(Eigen::Index(rng.uniform_int(std::uint64_t(n)))) += spec.spike_magnitude;
  if (spec.walk_sd > 0 || spec.num_spikes > 0)
    f.array() -= trimmed_mean(f);
  return f;
}

Eigen::VectorXd generate_common_factor(std::uint64_t seed, int n,
                                       const FactorSpec& spec) {
  Rng rng(seed);
  return generate_common_factor(rng, n, spec);
}

SignalMatrix contaminate(const SignalMatrix& m, const Eigen::VectorXd& factor,
                         const std::vector<double>& loadings) {
  if (factor.size() != m.n() ||
      Eigen::Index(loadings.size()) != m.num_signals())
    throw InvalidInput("contaminate: dimension mismatch");
  Eigen::MatrixXd values = m.values();
  for (Eigen::Index i = 0; i < m.num_signals(); ++i)
    values.col(i) += loadings[size_t(i)] * factor;
  return SignalMatrix(m.times(), std::move(values), m.signal_names());
}

namespace {

struct RepRecord {
  bool ok = false;
  // method x series, packed in the by_method key order.
  std::vector<std::vector<std::pair<double, double>>> cells;
};

const std::vector<std::string> kMethods = {
    "uncontaminated", "contaminated", "fourier", "kalman", "common_factor"};

RepRecord run_one(const ScenarioConfig& cfg, int r) {
  RepRecord rec;
  Rng rng(cfg.base_seed + std::uint64_t(r));
  const SignalMatrix u = draw_uncontaminated(rng, cfg);
  const Eigen::VectorXd f = generate_common_factor(rng, cfg.n, cfg.factor_spec);
  const SignalMatrix e = contaminate(u, f, cfg.factor_loadings);
  const Eigen::Index I = e.num_signals();

  rec.cells.assign(kMethods.size(), {});

  auto stats_of = [](const Eigen::MatrixXd& v) {
    std::vector<std::pair<double, double>> out;
    const ColumnStats s = column_stats(v);
    for (Eigen::Index i = 0; i < v.cols(); ++i)
      out.emplace_back(s.mean(i), s.sd_of_mean(i));
    return out;
  };
  rec.cells[0] = stats_of(u.values());
  rec.cells[1] = stats_of(e.values());

  for (Eigen::Index i = 0; i < I; ++i) {
    const Eigen::VectorXd y = e.values().col(i);

    const Eigen::VectorXd filtered = fourier_lowpass(y, cfg.fourier_cutoff);
    const SeriesSummary fs = summarize_series(filtered);
    // Fourier gives no principled error estimate; the sd column is descriptive.
    rec.cells[2].emplace_back(fs.mean, fs.sd_of_mean);

    KalmanLocalLevelParams kp;
    switch (cfg.kalman_mode) {
      case KalmanMode::kFixedRatio: {
        const double r_var = summarize_series(y).sd * summarize_series(y).sd;
        kp.observation_variance = r_var;
        kp.level_innovation_variance = cfg.kalman_psi * r_var;
        break;
      }
      case KalmanMode::kEstimate:
        kp = estimate_local_level_params(y);
        break;
      case KalmanMode::kFixed:
        kp.observation_variance = cfg.kalman_r;
        kp.level_innovation_variance = cfg.kalman_q;
        break;
    }
    const KalmanSmoothResult ks = kalman_smooth_local_level(y, kp);
    rec.cells[3].emplace_back(ks.smoothed_means.mean(),
                              std::sqrt(ks.mean_variance));
  }

  const FitResult fitted = fit(e, 1);
  const CleanedSeries cleaned = clean(e, fitted);
  for (Eigen::Index i = 0; i < I; ++i)
    rec.cells[4].emplace_back(cleaned.per_signal_mean(i),
                              cleaned.per_signal_se(i));

  rec.ok = true;
  return rec;
}

}  // namespace

ReplicationSummary run_replication_study(const ScenarioConfig& cfg, int jobs) {
  cfg.validate();
  const int R = cfg.replications;
  if (jobs <= 0) jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, R);

  std::vector<RepRecord> records(static_cast<size_t>(R));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= R) return;
      try {
        records[size_t(r)] = run_one(cfg, r);
      } catch (const Error&) {
        records[size_t(r)].ok = false;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ReplicationSummary sum;
  sum.replications_requested = R;
  const auto I = Eigen::Index(cfg.true_means.size());
  for (const auto& method : kMethods)
    sum.by_method[method].resize(size_t(I));
  for (int r = 0; r < R; ++r) {
    const RepRecord& rec = records[size_t(r)];
    if (!rec.ok) {
      sum.failed_replications.push_back(r);
      continue;
    }
    for (size_t mth = 0; mth < kMethods.size(); ++mth) {
      auto& dist = sum.by_method[kMethods[mth]];
      for (Eigen::Index i = 0; i < I; ++i) {
        dist[size_t(i)].means.push_back(rec.cells[mth][size_t(i)].first);
        dist[size_t(i)].sd_of_means.push_back(rec.cells[mth][size_t(i)].second);
      }
    }
  }
  if (double(sum.failed_replications.size()) > 0.01 * double(R))
    throw SolverFailure("more than 1% of replications failed (" +
                        std::to_string(sum.failed_replications.size()) + "/" +
                        std::to_string(R) + ")");
  return sum;
}

}  // namespace cofactor
