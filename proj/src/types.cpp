#include "cofactor/types.hpp"

#include <cmath>

namespace cofactor {

SignalMatrix::SignalMatrix(Eigen::VectorXd times, Eigen::MatrixXd values,
                           std::vector<std::string> signal_names)
    : times_(std::move(times)), values_(std::move(values)),
      names_(std::move(signal_names)) {
  const Eigen::Index n = values_.rows();
  const Eigen::Index I = values_.cols();
  if (n < 2) throw InvalidInput("SignalMatrix requires at least 2 rows");
  if (I < 1) throw InvalidInput("SignalMatrix requires at least 1 signal");
  if (times_.size() != n)
    throw InvalidInput("times length does not match row count");
  if (static_cast<Eigen::Index>(names_.size()) != I)
    throw InvalidInput("signal_names length does not match column count");
  if (!times_.allFinite() || !values_.allFinite())
    throw InvalidInput("non-finite entries are not accepted");
  for (Eigen::Index t = 1; t < n; ++t) {
    if (!(times_(t) > times_(t - 1)))
      throw InvalidInput("times must be strictly increasing");
  }
  for (Eigen::Index i = 0; i < I; ++i) {
    const Eigen::VectorXd col = values_.col(i);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / double(n - 1);
    if (!(var > 0))
      throw InvalidInput("signal '" + names_[i] + "' has zero sample variance");
  }
}

void FactorModel::validate() const {
  const Eigen::Index I = base_means.size();
  if (loadings.rows() != I || noise_variances.size() != I)
    throw InvalidInput("FactorModel dimensions disagree");
  if (k() < 0 || k() > I - 1)
    throw InvalidInput("factor count must satisfy 0 <= K <= I-1");
  if ((noise_variances.array() <= 0).any())
    throw InvalidInput("noise variances must be positive");
}

ColumnStats column_stats(const Eigen::MatrixXd& values) {
  const Eigen::Index n = values.rows();
  ColumnStats s;
  s.mean = values.colwise().mean();
  const Eigen::MatrixXd centered = values.rowwise() - s.mean.transpose();
  s.sd = (centered.array().square().colwise().sum() / double(n - 1))
             .sqrt().transpose().matrix();
  s.sd_of_mean = s.sd / std::sqrt(double(n));
  return s;
}

ColumnStats column_stats(const SignalMatrix& m) {
  return column_stats(m.values());
}

ResidualSse residual_sse(const SignalMatrix& m, const FactorModel& model,
                         const FactorScores& scores) {
  model.validate();
  const Eigen::Index n = m.n();
  const Eigen::Index I = m.num_signals();
  if (model.base_means.size() != I)
    throw InvalidInput("model has wrong signal count");
  if (scores.scores.rows() != n || scores.scores.cols() != model.k())
    throw InvalidInput("scores shape does not match model/data");

  Eigen::MatrixXd resid = m.values();
  resid.rowwise() -= model.base_means.transpose();
  if (model.k() > 0) resid -= scores.scores * model.loadings.transpose();

  ResidualSse out;
  out.per_time = resid.array().square().rowwise().sum().matrix();
  out.per_signal = resid.array().square().colwise().sum().transpose().matrix();
  out.total = out.per_signal.sum();
  out.weighted_total =
      (out.per_signal.array() / model.noise_variances.array()).sum();
  return out;
}

}  // namespace cofactor
