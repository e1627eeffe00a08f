#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cofactor/io.hpp"
#include "cofactor/solver.hpp"

namespace cofactor {
namespace {

constexpr const char* kToolVersion = "1.0.0";

using nlohmann::json;

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw InvalidInput("empty signal name in --signals");
    out.push_back(tok);
  }
  if (out.empty()) throw InvalidInput("--signals must name at least one column");
  return out;
}

Interval parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw InvalidInput("--interval must be start:end");
  Interval iv;
  iv.t_start = parse_double(text.substr(0, colon), "--interval start");
  iv.t_end = parse_double(text.substr(colon + 1), "--interval end");
  iv.validate();
  return iv;
}

struct InputFlags {
  std::string input, time_col, signals, interval;
};

SignalMatrix load_input(const InputFlags& in) {
  SignalMatrix m = load_csv(in.input, in.time_col, split_names(in.signals));
  if (!in.interval.empty()) m = select_interval(m, parse_interval(in.interval));
  return m;
}

void add_input_flags(CLI::App* app, InputFlags* in) {
  app->add_option("--input", in->input, "input CSV path")->required();
  app->add_option("--time-col", in->time_col, "time column name")->required();
  app->add_option("--signals", in->signals,
                  "comma-separated signal column names")->required();
  app->add_option("--interval", in->interval,
                  "start:end time window (inclusive, data time units)");
}

json stats_json(const Eigen::VectorXd& mean, const Eigen::VectorXd& se,
                const std::vector<std::string>& names) {
  json out = json::array();
  for (Eigen::Index i = 0; i < mean.size(); ++i)
    out.push_back({{"signal", names[size_t(i)]},
                   {"mean", mean(i)},
                   {"se", se(i)}});
  return out;
}

int cmd_clean(const InputFlags& in, int k, bool auto_k, int k_max,
              int min_signals, double decrease_threshold,
              const SolverOptions& opts, const std::string& out_dir) {
  const SignalMatrix m = load_input(in);
  const ColumnStats before = column_stats(m);

  int used_k = k;
  json selection = nullptr;
  if (auto_k) {
    const int km = k_max >= 0 ? k_max : default_k_max(m.num_signals());
    const KSelectionReport rep =
        select_num_factors(m, km, min_signals, decrease_threshold, opts);
    used_k = rep.chosen_k;
    selection = {{"k_max", rep.k_max},
                 {"min_signals", rep.min_signals},
                 {"decrease_threshold", rep.decrease_threshold},
                 {"chosen_k", rep.chosen_k}};
  }

  const FitResult r = fit(m, used_k, opts);
  const CleanedSeries cleaned = clean(m, r);

  std::filesystem::create_directories(out_dir);
  {
    std::vector<std::string> header = {in.time_col};
    for (const auto& s : cleaned.signal_names) header.push_back(s);
    Eigen::MatrixXd rows(m.n(), m.num_signals() + 1);
    rows.col(0) = cleaned.times;
    rows.rightCols(m.num_signals()) = cleaned.values;
    write_csv(out_dir + "/cleaned.csv", header, rows);
  }
  {
    std::vector<std::string> header = {in.time_col};
    for (int j = 1; j <= used_k; ++j) header.push_back("F" + std::to_string(j));
    Eigen::MatrixXd rows(m.n(), used_k + 1);
    rows.col(0) = m.times();
    if (used_k > 0) rows.rightCols(used_k) = r.scores.scores;
    write_csv(out_dir + "/factors.csv", header, rows);
  }

  json report;
  report["schema_version"] = 1;
  report["tool_version"] = kToolVersion;
  report["input"] = {{"path", in.input}, {"digest", file_digest(in.input)}};
  report["options"] = {{"c", opts.trim.c},
                       {"max_iterations", opts.max_iterations},
                       {"relative_tolerance", opts.relative_tolerance},
                       {"variance_floor", opts.variance_floor},
                       {"interval", in.interval.empty() ? json(nullptr)
                                                        : json(in.interval)}};
  report["k"] = used_k;
  report["selection"] = selection;
  report["converged"] = r.converged;
  report["iterations"] = r.iterations;
  report["objective_trace"] = r.objective_trace;
  report["factor_shifts"] = std::vector<double>(
      r.total_center_shifts.data(),
      r.total_center_shifts.data() + r.total_center_shifts.size());
  report["model"] = {
      {"base_means", std::vector<double>(r.model.base_means.data(),
                                         r.model.base_means.data() +
                                             r.model.base_means.size())},
      {"noise_variances",
       std::vector<double>(r.model.noise_variances.data(),
                           r.model.noise_variances.data() +
                               r.model.noise_variances.size())}};
  json loadings = json::array();
  for (Eigen::Index i = 0; i < r.model.loadings.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < r.model.loadings.cols(); ++j)
      row.push_back(r.model.loadings(i, j));
    loadings.push_back(row);
  }
  report["model"]["loadings"] = loadings;
  report["before"] = stats_json(before.mean, before.sd_of_mean, m.signal_names());
  report["after"] =
      stats_json(cleaned.per_signal_mean, cleaned.per_signal_se, m.signal_names());

  std::ofstream rout(out_dir + "/report.json");
  rout << report.dump(2) << "\n";
  if (!rout) throw InvalidInput("write failed for report.json");
  return 0;
}

int cmd_select_k(const InputFlags& in, int k_max, int min_signals,
                 double decrease_threshold, const SolverOptions& opts,
                 const std::string& out_dir) {
  const SignalMatrix m = load_input(in);
  const int km = k_max >= 0 ? k_max : default_k_max(m.num_signals());
  const KSelectionReport rep =
      select_num_factors(m, km, min_signals, decrease_threshold, opts);

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> header = {"k"};
  for (const auto& s : m.signal_names()) header.push_back("se_" + s);
  Eigen::MatrixXd rows(km + 1, m.num_signals() + 1);
  for (int k = 0; k <= km; ++k) {
    rows(k, 0) = k;
    rows.row(k).tail(m.num_signals()) = rep.se_table.row(k);
  }
  write_csv(out_dir + "/kselect.csv", header, rows);
  std::cout << rep.chosen_k << "\n";
  return 0;
}

void write_summary_outputs(const ScenarioConfig& cfg,
                           const ReplicationSummary& sum,
                           const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / double(v.size());
  };

  std::ofstream csv(out_dir + "/summary.csv");
  csv << "method,series,avg_mean,median_mean,avg_se,median_se,replications\n";
  json jsum;
  jsum["replications_requested"] = sum.replications_requested;
  jsum["failed_replications"] = sum.failed_replications;
  jsum["config"] = {{"n", cfg.n},
                    {"true_means", cfg.true_means},
                    {"noise_sd", cfg.noise_sd},
                    {"factor_loadings", cfg.factor_loadings},
                    {"replications", cfg.replications},
                    {"base_seed", cfg.base_seed},
                    {"fourier_cutoff", cfg.fourier_cutoff}};
  json methods;
  for (const auto& [method, dists] : sum.by_method) {
    json per_series = json::array();
    for (size_t i = 0; i < dists.size(); ++i) {
      const auto& d = dists[i];
      const double am = mean_of(d.means), mm = median(d.means);
      const double as = mean_of(d.sd_of_means), ms = median(d.sd_of_means);
      csv << method << "," << (i + 1) << "," << format_double(am) << ","
          << format_double(mm) << "," << format_double(as) << ","
          << format_double(ms) << "," << d.means.size() << "\n";
      per_series.push_back({{"series", i + 1},
                            {"avg_mean", am},
                            {"median_mean", mm},
                            {"avg_se", as},
                            {"median_se", ms}});
    }
    methods[method] = per_series;
  }
  jsum["methods"] = methods;
  if (!csv) throw InvalidInput("write failed for summary.csv");

  std::ofstream js(out_dir + "/summary.json");
  js << jsum.dump(2) << "\n";
  if (!js) throw InvalidInput("write failed for summary.json");

  std::ofstream hist(out_dir + "/histograms.csv");
  hist << "method,series,quantity,bin_lo,bin_hi,count\n";
  const int bins = sum.histogram_bins;
  auto emit = [&](const std::string& method, size_t series,
                  const std::string& quantity, const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi == lo) hi = lo + 1e-12;
    std::vector<int> counts(size_t(bins), 0);
    for (double x : v) {
      int b = int(double(bins) * (x - lo) / (hi - lo));
      b = std::clamp(b, 0, bins - 1);
      ++counts[size_t(b)];
    }
    for (int b = 0; b < bins; ++b) {
      const double w = (hi - lo) / double(bins);
      hist << method << "," << (series + 1) << "," << quantity << ","
           << format_double(lo + w * b) << "," << format_double(lo + w * (b + 1))
           << "," << counts[size_t(b)] << "\n";
    }
  };
  for (const auto& [method, dists] : sum.by_method)
    for (size_t i = 0; i < dists.size(); ++i) {
      emit(method, i, "mean", dists[i].means);
      emit(method, i, "se", dists[i].sd_of_means);
    }
  if (!hist) throw InvalidInput("write failed for histograms.csv");
}

int cmd_compare(const InputFlags& in, double cutoff, bool kalman_estimate,
                double kalman_q, double kalman_r, const std::string& out_dir) {
  const SignalMatrix m = load_input(in);
  const Eigen::Index I = m.num_signals();
  if (!uniform_spacing(m.times()))
    throw InvalidInput("Fourier filtering requires uniformly spaced times");

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/compare.csv");
  out << "signal,method,mean,se\n";
  for (Eigen::Index i = 0; i < I; ++i) {
    const Eigen::VectorXd y = m.values().col(i);
    const std::string name = m.signal_names()[size_t(i)];

    const SeriesSummary raw = summarize_series(y);
    out << name << ",raw," << format_double(raw.mean) << ","
        << format_double(raw.sd_of_mean) << "\n";

    const SeriesSummary f = summarize_series(fourier_lowpass(y, cutoff));
    out << name << ",fourier," << format_double(f.mean) << ",\n";

    KalmanSmoothResult ks =
        kalman_estimate
            ? kalman_smooth_local_level(y)
            : kalman_smooth_local_level(
                  y, KalmanLocalLevelParams{kalman_r, kalman_q, false});
    out << name << ",kalman," << format_double(ks.smoothed_means.mean()) << ","
        << format_double(std::sqrt(ks.mean_variance)) << "\n";
  }
  if (!out) throw InvalidInput("write failed for compare.csv");
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"common-factor multivariate time-series cleaning toolkit"};
  app.require_subcommand(1);

  InputFlags in;
  SolverOptions opts;
  int k = -1, k_max = -1, min_signals = 2, jobs = 0;
  bool auto_k = false;
  double decrease_threshold = 0.05;
  std::string out_dir = ".", config_path;
  long long seed = -1;
  int replications = -1;
  double cutoff = 0.05, kalman_q = 0, kalman_r = 0;
  bool kalman_estimate = false;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--c", opts.trim.c, "trim constant");
    sub->add_option("--max-iter", opts.max_iterations, "max solver iterations");
    sub->add_option("--tol", opts.relative_tolerance, "relative tolerance");
  };

  CLI::App* sc = app.add_subcommand("clean", "fit and remove common factors");
  add_input_flags(sc, &in);
  add_solver_flags(sc);
  sc->add_option("--k", k, "factor count");
  sc->add_flag("--auto-k", auto_k, "choose K automatically");
  sc->add_option("--k-max", k_max, "max K for --auto-k");
  sc->add_option("--min-signals", min_signals, "signals required per increment");
  sc->add_option("--decrease-threshold", decrease_threshold,
                 "relative SE decrease threshold");
  sc->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* sk = app.add_subcommand("select-k", "factor-count selection sweep");
  add_input_flags(sk, &in);
  add_solver_flags(sk);
  sk->add_option("--k-max", k_max, "max K to sweep");
  sk->add_option("--min-signals", min_signals, "signals required per increment");
  sk->add_option("--decrease-threshold", decrease_threshold,
                 "relative SE decrease threshold");
  sk->add_option("--out-dir", out_dir, "output directory");

  CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo replication study");
  sim->add_option("--config", config_path, "scenario config file")->required();
  sim->add_option("--replications", replications, "override replication count");
  sim->add_option("--seed", seed, "override base seed");
  sim->add_option("--jobs", jobs, "worker threads (default: hardware)");
  sim->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* cmp = app.add_subcommand("compare", "per-method means and SEs");
  add_input_flags(cmp, &in);
  cmp->add_option("--cutoff-fraction", cutoff, "Fourier cutoff fraction")
      ->required();
  cmp->add_option("--kalman-q", kalman_q, "fixed Kalman q");
  cmp->add_option("--kalman-r", kalman_r, "fixed Kalman r");
  cmp->add_flag("--kalman-estimate", kalman_estimate, "MLE Kalman parameters");
  cmp->add_option("--out-dir", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  if (sc->parsed()) {
    if (auto_k == (k >= 0))
      throw InvalidInput("clean requires exactly one of --k or --auto-k");
    return cmd_clean(in, k, auto_k, k_max, min_signals, decrease_threshold,
                     opts, out_dir);
  }
  if (sk->parsed())
    return cmd_select_k(in, k_max, min_signals, decrease_threshold, opts,
                        out_dir);
  if (sim->parsed()) {
    ScenarioConfig cfg = parse_scenario_config(config_path);
    if (replications > 0) cfg.replications = replications;
    if (seed >= 0) cfg.base_seed = std::uint64_t(seed);
    if (const char* env = std::getenv("COFACTOR_SEED")) {
      cfg.base_seed =
          std::uint64_t(parse_double(env, "COFACTOR_SEED environment variable"));
    }
    const ReplicationSummary sum = run_replication_study(cfg, jobs);
    write_summary_outputs(cfg, sum, out_dir);
    return 0;
  }
  if (cmp->parsed()) {
    if (!kalman_estimate && kalman_q == 0 && kalman_r == 0)
      throw InvalidInput(
          "compare requires --kalman-estimate or --kalman-q/--kalman-r");
    return cmd_compare(in, cutoff, kalman_estimate, kalman_q, kalman_r, out_dir);
  }
  return 2;
}

}  // namespace

int run_cli(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const SingularDesign& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cofactor
