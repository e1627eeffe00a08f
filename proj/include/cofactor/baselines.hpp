#pragma once

#include <Eigen/Dense>

#include "cofactor/types.hpp"

namespace cofactor {

struct KalmanLocalLevelParams {
  double observation_variance = 0;     // r
  double level_innovation_variance = 0;  // q
  bool estimated = false;

  void validate() const;
};

struct KalmanSmoothResult {
  Eigen::VectorXd smoothed_means;
  Eigen::VectorXd smoothed_variances;
  double mean_variance = 0;  // (1/n) sum V_t
  KalmanLocalLevelParams params;
};

// Zero every DFT bin whose frequency exceeds cutoff_fraction * Nyquist, then
// invert.  Exact-inverse, radix-agnostic; output is real.
Eigen::VectorXd fourier_lowpass(const Eigen::VectorXd& series,
                                double cutoff_fraction);

// Forward filter + RTS smoother for the local-level model
//   E_t = mu_t + eps_t,  mu_t = mu_{t-1} + eta_t.
// Diffuse start: a_1 = y_1, P_1 = r.
KalmanSmoothResult kalman_smooth_local_level(const Eigen::VectorXd& series,
                                             const KalmanLocalLevelParams& p);

// MLE of (q, r) by prediction-error decomposition, profiled over psi = q/r on
// a 61-point log grid in [1e-8, 1e2] refined by golden section.  Falls back to
// method-of-moments on lag-1 differences when the likelihood is degenerate.
KalmanLocalLevelParams estimate_local_level_params(const Eigen::VectorXd& series);

// Convenience: estimate then smooth.
KalmanSmoothResult kalman_smooth_local_level(const Eigen::VectorXd& series);

struct SeriesSummary {
  double mean = 0;
  double sd = 0;
  double sd_of_mean = 0;
};

SeriesSummary summarize_series(const Eigen::VectorXd& series);

}  // namespace cofactor
