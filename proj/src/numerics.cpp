#include "cofactor/numerics.hpp"

#include <cmath>

namespace cofactor {

double trimmed_mean(const Eigen::VectorXd& x, TrimConstant tc, bool* fell_back) {
  if (fell_back) *fell_back = false;
  const Eigen::Index n = x.size();
  if (n == 0) throw InvalidInput("trimmed_mean: empty input");
  if (!x.allFinite()) throw InvalidInput("trimmed_mean: non-finite input");
  if (!(tc.c > 0)) throw InvalidInput("trim constant must be positive");
  const double mean = x.mean();
  if (n == 1) return mean;
  const double sd =
      std::sqrt((x.array() - mean).square().sum() / double(n - 1));
  if (sd == 0) return mean;

  double sum = 0;
  Eigen::Index count = 0;
  const double band = tc.c * sd;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (std::abs(x(t) - mean) <= band) {
      sum += x(t);
      ++count;
    }
  }
  if (count == 0) {
    // Possible only for c < 1 (Chebyshev guarantees a survivor at c >= 1).
    if (fell_back) *fell_back = true;
    return mean;
  }
  return sum / double(count);
}

Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& design,
                                       const Eigen::VectorXd& response,
                                       const Eigen::VectorXd& weights) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (response.size() != n || weights.size() != n)
    throw InvalidInput("weighted_least_squares: dimension mismatch");
  if ((weights.array() <= 0).any())
    throw InvalidInput("weighted_least_squares: weights must be positive");
  if (n < p) throw SingularDesign("underdetermined system", INFINITY);

  const Eigen::ArrayXd sw = weights.array().sqrt();
  const Eigen::MatrixXd a = design.array().colwise() * sw;
  const Eigen::VectorXd b = response.array() * sw;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd diag = qr.matrixR().diagonal().head(p).cwiseAbs();
  const double cond = diag.minCoeff() > 0
                          ? diag.maxCoeff() / diag.minCoeff()
                          : INFINITY;
  if (qr.rank() < p || cond > 1e12)
    throw SingularDesign("rank-deficient weighted design", cond);
  return qr.solve(b);
}

double propagate_error(const Eigen::VectorXd& gradient,
                       const Eigen::VectorXd& sigmas) {
  if (gradient.size() != sigmas.size())
    throw InvalidInput("propagate_error: length mismatch");
  if ((sigmas.array() < 0).any())
    throw InvalidInput("propagate_error: sigmas must be non-negative");
  return (gradient.array() * sigmas.array()).matrix().norm();
}

}  // namespace cofactor
