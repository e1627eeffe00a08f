#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cofactor/baselines.hpp"
#include "cofactor/rng.hpp"
#include "cofactor/types.hpp"

namespace cofactor {

// Common-factor waveform generator ("smooth-walk-with-spikes"): a standard
// Gaussian random walk rescaled to unit sd, plus spikes at uniform positions,
// shifted so the trimmed mean (c = 2.326) is zero.
struct FactorSpec {
  double walk_sd = 1.0;
  int num_spikes = 2;
  double spike_magnitude = 5.0;

  void validate() const;
};

enum class KalmanMode {
  kFixedRatio,  // q/r pinned, r = per-series sample variance
  kEstimate,    // per-replication MLE
  kFixed,       // user-supplied q, r
};

struct ScenarioConfig {
  int n = 100;
  std::vector<double> true_means = {1, 5, 10};
  double noise_sd = 1.0;
  std::vector<double> factor_loadings = {1, 1.5, 2};
  FactorSpec factor_spec;
  int replications = 1000;
  std::uint64_t base_seed = 20260800;
  double fourier_cutoff = 0.05;
  KalmanMode kalman_mode = KalmanMode::kFixedRatio;
  double kalman_psi = 1e-5;  // q/r for kFixedRatio
  double kalman_q = 0;       // for kFixed
  double kalman_r = 0;

  void validate() const;
};

struct MethodSeriesDistribution {
  // One entry per successful replication.
  std::vector<double> means;
  std::vector<double> sd_of_means;
};

struct ReplicationSummary {
  // method -> per-series distributions; methods: "uncontaminated",
  // "contaminated", "fourier", "kalman", "common_factor".
  std::map<std::string, std::vector<MethodSeriesDistribution>> by_method;
  std::vector<int> failed_replications;
  int replications_requested = 0;
  int histogram_bins = 30;
};

SignalMatrix generate_uncontaminated(std::uint64_t seed, const ScenarioConfig& cfg);
Eigen::VectorXd generate_common_factor(Rng& rng, int n, const FactorSpec& spec);
Eigen::VectorXd generate_common_factor(std::uint64_t seed, int n, const FactorSpec& spec);
SignalMatrix contaminate(const SignalMatrix& m, const Eigen::VectorXd& factor,
                         const std::vector<double>& loadings);

// Runs the full Sec. 3 study: replication r uses seed = base_seed + r; failed
// replications are excluded and recorded; aborts when more than 1% fail.
ReplicationSummary run_replication_study(const ScenarioConfig& cfg, int jobs = 0);

}  // namespace cofactor
