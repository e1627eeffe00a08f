#pragma once

#include <Eigen/Dense>

#include "cofactor/errors.hpp"

namespace cofactor {

struct TrimConstant {
  double c = 2.326;  // 99th percentile of the standard normal
};

// Mean over the values within c sample standard deviations of the full-sample
// mean.  Single pass: the band is computed once from the untrimmed mean/sd.
// For c < 1 the band can be empty; we then fall back to the untrimmed mean and
// set *fell_back if provided.
double trimmed_mean(const Eigen::VectorXd& x, TrimConstant c = {},
                    bool* fell_back = nullptr);

// argmin_b sum_t w_t (y_t - x_t' b)^2 via QR on the sqrt(w)-scaled system.
// Throws SingularDesign when the weighted design's condition estimate exceeds
// 1e12 or the rank is deficient.
Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& response,
                                       const Eigen::VectorXd& weights);

// First-order propagation: sqrt(sum_j (grad_j sigma_j)^2).
double propagate_error(const Eigen::VectorXd& gradient,
                       const Eigen::VectorXd& sigmas);

}  // namespace cofactor
