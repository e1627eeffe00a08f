#pragma once

#include "cofactor/types.hpp"

namespace cofactor {

// Initialization: principal-factor extraction on the sample covariance.
// Loadings column j = sqrt(lambda_j) v_j for the j-th largest eigenpair;
// noise variances = diag(S - BB') floored at 1e-3 diag(S).  Eigenvector signs
// are fixed so each column's largest-magnitude entry is positive.
FactorModel init_factor_model(const SignalMatrix& m, Eigen::Index k);

}  // namespace cofactor
