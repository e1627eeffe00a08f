#include "cofactor/solver.hpp"

#include <cmath>

#include "cofactor/factor_init.hpp"

namespace cofactor {

void SolverOptions::validate() const {
  if (max_iterations <= 0 || relative_tolerance <= 0 || trim.c <= 0 ||
      variance_floor <= 0)
    throw InvalidInput("SolverOptions fields must all be positive");
}

FactorScores estimate_factors(const SignalMatrix& m, const FactorModel& model) {
  model.validate();
  const Eigen::Index k = model.k();
  if (model.base_means.size() != m.num_signals())
    throw InvalidInput("estimate_factors: model/data signal count mismatch");
  if (k == 0) return FactorScores{Eigen::MatrixXd(m.n(), 0)};

  // G = Sigma^-1 B,  M = B' Sigma^-1 B,  F = (E - 1 mu') G M^-1.
  const Eigen::MatrixXd g =
      model.loadings.array().colwise() / model.noise_variances.array();
  const Eigen::MatrixXd gram = model.loadings.transpose() * g;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    throw SingularDesign("singular B' Sigma^-1 B", INFINITY);
  const Eigen::MatrixXd centered =
      m.values().rowwise() - model.base_means.transpose();
  // M is symmetric, so F' = M^-1 G' centered' transposes to the line below.
  FactorScores out;
  out.scores = lu.solve((centered * g).transpose()).transpose();
  return out;
}

Eigen::VectorXd center_factors(FactorScores& scores, TrimConstant c) {
  const Eigen::Index k = scores.scores.cols();
  Eigen::VectorXd shifts(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    shifts(j) = trimmed_mean(scores.scores.col(j), c);
    scores.scores.col(j).array() -= shifts(j);
  }
  return shifts;
}

namespace {

struct OlsFit {
  FactorModel model;
  Eigen::VectorXd per_signal_sse;
};

OlsFit ols_update(const SignalMatrix& m, const FactorScores& scores,
                  const SolverOptions& opts) {
  const Eigen::Index n = m.n();
  const Eigen::Index k = scores.scores.cols();
  if (scores.scores.rows() != n)
    throw InvalidInput("update_params: score row count mismatch");
  if (n - k - 1 <= 0)
    throw InvalidInput("update_params: need n > K + 1");

  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = scores.scores;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd diag =
      qr.matrixR().diagonal().head(k + 1).cwiseAbs();
  const double cond = diag.minCoeff() > 0
                          ? diag.maxCoeff() / diag.minCoeff()
                          : INFINITY;
  if (qr.rank() < k + 1 || cond > 1e12)
    throw SingularDesign("rank-deficient [1|F] design", cond);

  const Eigen::MatrixXd coef = qr.solve(m.values());  // (k+1) x I
  const Eigen::MatrixXd resid = m.values() - design * coef;

  OlsFit out;
  out.per_signal_sse = resid.array().square().colwise().sum().transpose().matrix();
  out.model.base_means = coef.row(0);
  out.model.loadings = coef.bottomRows(k).transpose();
  out.model.noise_variances =
      (out.per_signal_sse.array() / double(n - k - 1))
          .max(opts.variance_floor).matrix();
  out.model.validate();
  return out;
}

FitResult fit_k0(const SignalMatrix& m, const SolverOptions& opts) {
  const Eigen::Index n = m.n();
  FitResult r;
  r.model.base_means = m.values().colwise().mean();
  r.model.loadings.resize(m.num_signals(), 0);
  r.per_signal_sse =
      (m.values().rowwise() - r.model.base_means.transpose())
          .array().square().colwise().sum().transpose().matrix();
  r.model.noise_variances =
      (r.per_signal_sse.array() / double(n - 1)).max(opts.variance_floor).matrix();
  r.scores.scores.resize(n, 0);
  r.total_center_shifts.resize(0);
  r.converged = true;
  return r;
}

double frozen_objective(const SignalMatrix& m, const FactorModel& params,
                        const FactorScores& scores,
                        const Eigen::VectorXd& frozen_var) {
  Eigen::MatrixXd resid = m.values();
  resid.rowwise() -= params.base_means.transpose();
  if (params.k() > 0) resid -= scores.scores * params.loadings.transpose();
  return (resid.array().square().colwise().sum().transpose() /
          frozen_var.array()).sum();
}

}  // namespace

FactorModel update_params(const SignalMatrix& m, const FactorScores& scores,
                          const SolverOptions& opts) {
  opts.validate();
  return ols_update(m, scores, opts).model;
}

FitResult fit(const SignalMatrix& m, Eigen::Index k, const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index I = m.num_signals();
  if (k < 0 || k > I - 1)
    throw InvalidInput("fit requires 0 <= K <= I-1");
  if (k == 0) return fit_k0(m, opts);
  if (m.n() - k - 1 <= 0) throw InvalidInput("fit: need n > K + 1");

  FitResult r;
  FactorModel model = init_factor_model(m, k);
  r.total_center_shifts = Eigen::VectorXd::Zero(k);
  double prev_j = NAN;

  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd frozen_var = model.noise_variances;
    FactorScores scores = estimate_factors(m, model);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::VectorXd col = scores.scores.col(j);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() /
                                  double(m.n() - 1));
      if (sd < 1e-14)
        throw SolverFailure("factor column collapsed to constant");
    }
    r.total_center_shifts += center_factors(scores, opts.trim);

    const double j_mid = frozen_objective(m, model, scores, frozen_var);
    OlsFit upd = ols_update(m, scores, opts);

    const double j_end =
        (upd.per_signal_sse.array() / frozen_var.array()).sum();
    r.objective_trace_start.push_back(j_mid);
    r.objective_trace.push_back(j_end);
    if (j_end > j_mid * (1 + 1e-9) + 1e-12)
      throw SolverFailure("frozen-weight objective increased within a cycle");

    model = upd.model;
    r.scores = std::move(scores);
    r.per_signal_sse = upd.per_signal_sse;
    r.iterations = it + 1;

    if (it > 0 && std::abs(prev_j - j_end) <=
                      opts.relative_tolerance * std::max(prev_j, 1e-300)) {
      r.converged = true;
      break;
    }
    prev_j = j_end;
  }
  r.model = std::move(model);
  return r;
}

CleanedSeries clean(const SignalMatrix& m, const FitResult& fit) {
  if (fit.scores.scores.rows() != m.n() ||
      fit.model.loadings.rows() != m.num_signals())
    throw InvalidInput("clean: fit does not match the signal matrix");
  CleanedSeries out;
  out.times = m.times();
  out.signal_names = m.signal_names();
  out.values = m.values();
  if (fit.model.k() > 0)
    out.values -= fit.scores.scores * fit.model.loadings.transpose();
  const ColumnStats stats = column_stats(out.values);
  out.per_signal_mean = stats.mean;
  out.per_signal_se = stats.sd_of_mean;
  return out;
}

KSelectionReport select_num_factors(const SignalMatrix& m, int k_max,
                                    int min_signals, double decrease_threshold,
                                    const SolverOptions& opts) {
  opts.validate();
  const Eigen::Index I = m.num_signals();
  if (k_max < 0 || k_max > I - 1)
    throw InvalidInput("select_num_factors requires 0 <= k_max <= I-1");
  if (min_signals < 1 || decrease_threshold <= 0)
    throw InvalidInput("invalid selection parameters");

  KSelectionReport rep;
  rep.k_max = k_max;
  rep.min_signals = min_signals;
  rep.decrease_threshold = decrease_threshold;
  rep.se_table = Eigen::MatrixXd::Constant(k_max + 1, I, NAN);

  const double root_n = std::sqrt(double(m.n()));
  for (int k = 0; k <= k_max; ++k) {
    try {
      const FitResult r = fit(m, k, opts);
      // Floored so a fully absorbed signal reports ~0 relative decrease
      // instead of rounding noise.
      rep.se_table.row(k) =
          (r.per_signal_sse.array() / double(m.n() - k - 1))
              .max(opts.variance_floor).sqrt().transpose() / root_n;
      rep.per_k_status.push_back("ok");
    } catch (const Error& e) {
      rep.per_k_status.push_back(e.what());
    }
  }

  rep.chosen_k = 0;
  for (int k = 0; k < k_max; ++k) {
    if (rep.per_k_status[k] != "ok" || rep.per_k_status[k + 1] != "ok") break;
    const Eigen::ArrayXd prev = rep.se_table.row(k).transpose().array();
    const Eigen::ArrayXd next = rep.se_table.row(k + 1).transpose().array();
    const int helped = int(((prev - next) / prev > decrease_threshold).count());
    if (helped >= min_signals)
      rep.chosen_k = k + 1;
    else
      break;
  }
  return rep;
}

}  // namespace cofactor
