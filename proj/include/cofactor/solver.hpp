#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cofactor/numerics.hpp"
#include "cofactor/types.hpp"

namespace cofactor {

struct SolverOptions {
  int max_iterations = 500;
  double relative_tolerance = 1e-8;  // on the frozen-weight weighted SSE
  TrimConstant trim{2.326};
  double variance_floor = 1e-12;     // absolute floor on sigma_i^2

  void validate() const;
};

struct KSelectionReport {
  // row per K = 0..k_max, column per signal: sigma_hat_i(K)
  Eigen::MatrixXd se_table;
  std::vector<std::string> per_k_status;  // "ok" or the error message
  int chosen_k = 0;
  int k_max = 0;
  int min_signals = 2;
  double decrease_threshold = 0.05;
};

// Weighted closed form F' = (B' S^-1 B)^-1 B' S^-1 (E - U)'.
FactorScores estimate_factors(const SignalMatrix& m, const FactorModel& model);

// Subtract the trimmed mean from each column; returns the shifts.
Eigen::VectorXd center_factors(FactorScores& scores, TrimConstant c = {});

// Per-signal OLS of E on [1 | F]; sigma_i^2 = S_i/(n-K-1), floored.
FactorModel update_params(const SignalMatrix& m, const FactorScores& scores,
                          const SolverOptions& opts = {});

// Full solve: init then alternate score estimation / parameter update until
// the frozen-weight objective stops decreasing.
FitResult fit(const SignalMatrix& m, Eigen::Index k,
              const SolverOptions& opts = {});

// Cleaned data E* = E - F B'.  mu is retained.
CleanedSeries clean(const SignalMatrix& m, const FitResult& fit);

// Standard-error-vs-K sweep; K accepted while each increment drops sigma_hat by more
// than decrease_threshold (relative) for at least min_signals signals.
KSelectionReport select_num_factors(const SignalMatrix& m, int k_max,
                                    int min_signals = 2,
                                    double decrease_threshold = 0.05,
                                    const SolverOptions& opts = {});

inline int default_k_max(Eigen::Index num_signals) {
  return static_cast<int>(std::min<Eigen::Index>(num_signals - 1, 5));
}

}  // namespace cofactor
