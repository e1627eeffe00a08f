#pragma once

#include <string>
#include <vector>

#include "cofactor/rng.hpp"
#include "cofactor/types.hpp"

namespace cofactor::testutil {

inline SignalMatrix make_matrix(const Eigen::MatrixXd& values) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < values.cols(); ++i)
    names.push_back("s" + std::to_string(i + 1));
  return SignalMatrix(
      Eigen::VectorXd::LinSpaced(values.rows(), 0, double(values.rows() - 1)),
      values, names);
}

// Gaussian data with given column means.
inline Eigen::MatrixXd noise_matrix(Rng& rng, Eigen::Index n, Eigen::Index cols,
                                    const std::vector<double>& means,
                                    double sd = 1.0) {
  Eigen::MatrixXd v(n, cols);
  for (Eigen::Index i = 0; i < cols; ++i)
    for (Eigen::Index t = 0; t < n; ++t)
      v(t, i) = means[size_t(i)] + sd * rng.normal();
  return v;
}

}  // namespace cofactor::testutil
