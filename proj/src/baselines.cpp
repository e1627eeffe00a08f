#include "cofactor/baselines.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace cofactor {

void KalmanLocalLevelParams::validate() const {
  if (observation_variance < 0 || level_innovation_variance < 0)
    throw InvalidInput("Kalman variances must be non-negative");
  if (observation_variance == 0 && level_innovation_variance == 0)
    throw InvalidInput("degenerate local-level model: q = r = 0");
}

Eigen::VectorXd fourier_lowpass(const Eigen::VectorXd& series,
                                double cutoff_fraction) {
  const Eigen::Index n = series.size();
  if (n < 4) throw InvalidInput("fourier_lowpass: need n >= 4");
  if (!(cutoff_fraction > 0) || cutoff_fraction > 1)
    throw InvalidInput("cutoff_fraction must be in (0, 1]");
  if (!series.allFinite()) throw InvalidInput("fourier_lowpass: non-finite input");

  Eigen::FFT<double> fft;
  std::vector<double> in(series.data(), series.data() + n);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);

  // Bin i carries frequency min(i, n-i) / (n/2) in Nyquist units; zero bins
  // strictly above the cutoff.  Symmetric zeroing keeps conjugate symmetry.
  const double half = double(n) / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double frac = double(std::min<Eigen::Index>(i, n - i)) / half;
    if (frac > cutoff_fraction) spec[size_t(i)] = 0;
  }

  std::vector<double> out;
  fft.inv(out, spec);
  return Eigen::Map<Eigen::VectorXd>(out.data(), n);
}

KalmanSmoothResult kalman_smooth_local_level(const Eigen::VectorXd& y,
                                             const KalmanLocalLevelParams& p) {
  p.validate();
  const Eigen::Index n = y.size();
  if (n < 2) throw InvalidInput("kalman_smooth_local_level: need n >= 2");
  if (!y.allFinite()) throw InvalidInput("kalman: non-finite input");
  const double q = p.level_innovation_variance;
  const double r = p.observation_variance;

  // Forward pass (diffuse start a_1 = y_1, P_1 = r), then RTS backward pass.
  Eigen::VectorXd a(n), pf(n), a_pred(n), p_pred(n);
  a(0) = y(0);
  pf(0) = r;
  for (Eigen::Index t = 1; t < n; ++t) {
    a_pred(t) = a(t - 1);
    p_pred(t) = pf(t - 1) + q;
    const double innov_var = p_pred(t) + r;
    const double gain = innov_var > 0 ? p_pred(t) / innov_var : 0;
    a(t) = a_pred(t) + gain * (y(t) - a_pred(t));
    pf(t) = p_pred(t) * (1 - gain);
  }

  KalmanSmoothResult res;
  res.params = p;
  res.smoothed_means.resize(n);
  res.smoothed_variances.resize(n);
  res.smoothed_means(n - 1) = a(n - 1);
  res.smoothed_variances(n - 1) = pf(n - 1);
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const double c = p_pred(t + 1) > 0 ? pf(t) / p_pred(t + 1) : 0;
    res.smoothed_means(t) =
        a(t) + c * (res.smoothed_means(t + 1) - a_pred(t + 1));
    res.smoothed_variances(t) =
        pf(t) + c * c * (res.smoothed_variances(t + 1) - p_pred(t + 1));
  }
  res.mean_variance = res.smoothed_variances.mean();
  return res;
}

namespace {

// Concentrated negative log-likelihood at psi = q/r (r profiled out).
// Filter run with r = 1, q = psi; t = 1 carries no information under the
// diffuse start.
double profile_negloglik(const Eigen::VectorXd& y, double psi, double* r_hat) {
  const Eigen::Index n = y.size();
  double a = y(0), pf = 1.0;
  double sum_log_f = 0, sum_v2_f = 0;
  for (Eigen::Index t = 1; t < n; ++t) {
    const double p_pred = pf + psi;
    const double f = p_pred + 1.0;
    const double v = y(t) - a;
    sum_log_f += std::log(f);
    sum_v2_f += v * v / f;
    const double gain = p_pred / f;
    a += gain * v;
    pf = p_pred * (1 - gain);
  }
  const double rh = sum_v2_f / double(n - 1);
  if (r_hat) *r_hat = rh;
  if (!(rh > 0) || !std::isfinite(rh)) return std::numeric_limits<double>::infinity();
  return 0.5 * (sum_log_f + double(n - 1) * (std::log(rh) + 1.0));
}

KalmanLocalLevelParams moments_fallback(const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  const Eigen::VectorXd d = y.tail(n - 1) - y.head(n - 1);
  const double dm = d.mean();
  double var = 0, acov1 = 0;
  for (Eigen::Index t = 0; t < d.size(); ++t) var += (d(t) - dm) * (d(t) - dm);
  var /= double(d.size() - 1);
  for (Eigen::Index t = 0; t + 1 < d.size(); ++t)
    acov1 += (d(t) - dm) * (d(t + 1) - dm);
  acov1 /= double(d.size() - 1);
  KalmanLocalLevelParams p;
  p.observation_variance = std::max(-acov1, 1e-12 * std::max(var, 1.0));
  p.level_innovation_variance =
      std::max(var - 2 * p.observation_variance, 1e-12 * std::max(var, 1.0));
  p.estimated = true;
  return p;
}

}  // namespace

KalmanLocalLevelParams estimate_local_level_params(const Eigen::VectorXd& y) {
  if (y.size() < 3) throw InvalidInput("estimate_local_level_params: need n >= 3");
  if (!y.allFinite()) throw InvalidInput("kalman: non-finite input");

  // 61-point log grid on psi = q/r in [1e-8, 1e2].
  const int grid = 61;
  const double lo = std::log(1e-8), hi = std::log(1e2);
  int best = -1;
  double best_nll = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double psi = std::exp(lo + (hi - lo) * double(i) / double(grid - 1));
    const double nll = profile_negloglik(y, psi, nullptr);
    if (nll < best_nll) {
      best_nll = nll;
      best = i;
    }
  }
  if (best < 0) return moments_fallback(y);

  // Golden-section refinement on log-psi around the best grid cell.
  const double step = (hi - lo) / double(grid - 1);
  double a = lo + step * double(std::max(best - 1, 0));
  double b = lo + step * double(std::min(best + 1, grid - 1));
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = profile_negloglik(y, std::exp(x1), nullptr);
  double f2 = profile_negloglik(y, std::exp(x2), nullptr);
  for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a);
      f1 = profile_negloglik(y, std::exp(x1), nullptr);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a);
      f2 = profile_negloglik(y, std::exp(x2), nullptr);
    }
  }
  const double psi = std::exp((a + b) / 2);
  double r_hat = 0;
  const double nll = profile_negloglik(y, psi, &r_hat);
  if (!std::isfinite(nll) || !(r_hat > 0)) return moments_fallback(y);

  KalmanLocalLevelParams p;
  p.observation_variance = r_hat;
  p.level_innovation_variance = psi * r_hat;
  p.estimated = true;
  if (p.observation_variance == 0 && p.level_innovation_variance == 0)
    return moments_fallback(y);
  return p;
}

KalmanSmoothResult kalman_smooth_local_level(const Eigen::VectorXd& y) {
  return kalman_smooth_local_level(y, estimate_local_level_params(y));
}

SeriesSummary summarize_series(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw InvalidInput("summarize_series: need n >= 2");
  if (!series.allFinite()) throw InvalidInput("summarize_series: non-finite input");
  SeriesSummary s;
  s.mean = series.mean();
  s.sd = std::sqrt((series.array() - s.mean).square().sum() / double(n - 1));
  s.sd_of_mean = s.sd / std::sqrt(double(n));
  return s;
}

}  // namespace cofactor
