#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cofactor/errors.hpp"

namespace cofactor {

// Timestamped n x I matrix of sensor readings.  Immutable after construction;
// the constructor enforces strictly increasing times, finiteness and positive
// per-column sample variance.
class SignalMatrix {
 public:
  SignalMatrix(Eigen::VectorXd times, Eigen::MatrixXd values,
               std::vector<std::string> signal_names);

  const Eigen::VectorXd& times() const { return times_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& signal_names() const { return names_; }
  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index num_signals() const { return values_.cols(); }

 private:
  Eigen::VectorXd times_;
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

// Fitted parameters of the factor model: loadings B (I x K), base means mu,
// diagonal noise variances.
struct FactorModel {
  Eigen::MatrixXd loadings;         // I x K
  Eigen::VectorXd base_means;       // I
  Eigen::VectorXd noise_variances;  // I, all > 0
  Eigen::Index k() const { return loadings.cols(); }

  void validate() const;
};

// n x K matrix of factor scores.
struct FactorScores {
  Eigen::MatrixXd scores;
};

struct FitResult {
  FactorModel model;
  FactorScores scores;
  // End-of-cycle weighted SSE per iteration, weights frozen at the values used
  // by that cycle's score estimation.
  std::vector<double> objective_trace;
  // Same frozen-weight objective evaluated at the start of the parameter
  // update (incoming mu/B with the freshly centered scores); the per-cycle
  // monotonicity invariant is objective_trace[m] <= objective_trace_start[m].
  std::vector<double> objective_trace_start;
  Eigen::VectorXd per_signal_sse;      // S^(i)
  Eigen::VectorXd total_center_shifts; // per-factor sums of trim-centering shifts
  bool converged = false;
  int iterations = 0;
};

struct CleanedSeries {
  Eigen::VectorXd times;
  Eigen::MatrixXd values;            // E*
  Eigen::VectorXd per_signal_mean;
  Eigen::VectorXd per_signal_se;     // sd/sqrt(n)
  std::vector<std::string> signal_names;
};

struct ColumnStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;          // n-1 denominator
  Eigen::VectorXd sd_of_mean;  // sd / sqrt(n)
};

ColumnStats column_stats(const SignalMatrix& m);
ColumnStats column_stats(const Eigen::MatrixXd& values);

struct ResidualSse {
  double total = 0;              // S
  Eigen::VectorXd per_time;      // s_t
  Eigen::VectorXd per_signal;    // S^(i)
  double weighted_total = 0;     // sum_i S^(i) / sigma_i^2
};

// Residuals of E against mu + B F', grouped by time, by signal, and weighted.
ResidualSse residual_sse(const SignalMatrix& m, const FactorModel& model,
                         const FactorScores& scores);

}  // namespace cofactor
