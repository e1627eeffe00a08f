#include "cofactor/factor_init.hpp"

#include <cmath>

namespace cofactor {

FactorModel init_factor_model(const SignalMatrix& m, Eigen::Index k) {
  const Eigen::Index n = m.n();
  const Eigen::Index I = m.num_signals();
  if (k < 1 || k > I - 1)
    throw InvalidInput("init_factor_model requires 1 <= k <= I-1");

  const Eigen::VectorXd mu = m.values().colwise().mean();
  const Eigen::MatrixXd centered = m.values().rowwise() - mu.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / double(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw SolverFailure("covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues; take the top k, largest first.
  FactorModel model;
  model.base_means = mu;
  model.loadings.resize(I, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = I - 1 - j;
    const double lambda = std::max(es.eigenvalues()(src), 0.0);
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;  // sign convention: largest-magnitude entry > 0
    model.loadings.col(j) = std::sqrt(lambda) * v;
  }
  const Eigen::VectorXd diag = cov.diagonal();
  const Eigen::VectorXd communality =
      model.loadings.array().square().rowwise().sum();
  model.noise_variances =
      ((diag - communality).array().max(1e-3 * diag.array())).matrix();
  model.validate();
  return model;
}

}  // namespace cofactor
