#include "cofactor/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cofactor {

void Interval::validate() const {
  if (!(t_start < t_end)) throw InvalidInput("interval requires t_start < t_end");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  std::string t = token;
  // Trim surrounding whitespace.
  const auto first = t.find_first_not_of(" \t\r");
  const auto last = t.find_last_not_of(" \t\r");
  if (first == std::string::npos)
    throw InvalidInput("empty numeric cell at " + context);
  t = t.substr(first, last - first + 1);
  double out = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw InvalidInput("unparsable number '" + token + "' at " + context);
  if (!std::isfinite(out))
    throw InvalidInput("non-finite value at " + context);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, last - first + 1);
}

}  // namespace

SignalMatrix load_csv(const std::string& path, const std::string& time_column,
                      const std::vector<std::string>& signal_columns) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  if (signal_columns.empty())
    throw InvalidInput("at least one signal column is required");

  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty file '" + path + "'");
  const auto header = split_csv_line(line);
  auto find_col = [&](const std::string& name) -> size_t {
    for (size_t j = 0; j < header.size(); ++j)
      if (trim(header[j]) == name) return j;
    throw InvalidInput("column '" + name + "' not found in '" + path + "'");
  };
  const size_t time_idx = find_col(time_column);
  std::vector<size_t> sig_idx;
  for (const auto& name : signal_columns) sig_idx.push_back(find_col(name));

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw InvalidInput("row " + std::to_string(lineno) + " has too few cells");
    const std::string where = "row " + std::to_string(lineno);
    times.push_back(parse_double(cells[time_idx], where + ", column '" + time_column + "'"));
    std::vector<double> row;
    for (size_t j = 0; j < sig_idx.size(); ++j)
      row.push_back(parse_double(cells[sig_idx[j]],
                                 where + ", column '" + signal_columns[j] + "'"));
    rows.push_back(std::move(row));
  }
  const auto n = Eigen::Index(times.size());
  if (n < 2) throw InvalidInput("'" + path + "' has fewer than 2 data rows");

  // Stable sort by time, then reject duplicates.
  std::vector<size_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), size_t(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return times[a] < times[b]; });
  Eigen::VectorXd t(n);
  Eigen::MatrixXd values(n, Eigen::Index(signal_columns.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    t(r) = times[order[size_t(r)]];
    for (size_t j = 0; j < signal_columns.size(); ++j)
      values(r, Eigen::Index(j)) = rows[order[size_t(r)]][j];
  }
  for (Eigen::Index r = 1; r < n; ++r)
    if (t(r) == t(r - 1))
      throw InvalidInput("duplicate timestamp " + format_double(t(r)));
  return SignalMatrix(std::move(t), std::move(values), signal_columns);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows) {
  if (Eigen::Index(header.size()) != rows.cols())
    throw InvalidInput("write_csv: header/column count mismatch");
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  for (size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << "\n";
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      out << (j ? "," : "") << format_double(rows(r, j));
    out << "\n";
  }
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

SignalMatrix select_interval(const SignalMatrix& m, const Interval& iv) {
  iv.validate();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < m.n(); ++t)
    if (m.times()(t) >= iv.t_start && m.times()(t) <= iv.t_end)
      keep.push_back(t);
  if (Eigen::Index(keep.size()) < 10)
    throw InvalidInput("interval selects " + std::to_string(keep.size()) +
                       " rows; at least 10 required");
  Eigen::VectorXd t(Eigen::Index(keep.size()));
  Eigen::MatrixXd values(Eigen::Index(keep.size()), m.num_signals());
  for (size_t r = 0; r < keep.size(); ++r) {
    t(Eigen::Index(r)) = m.times()(keep[r]);
    values.row(Eigen::Index(r)) = m.values().row(keep[r]);
  }
  return SignalMatrix(std::move(t), std::move(values), m.signal_names());
}

bool uniform_spacing(const Eigen::VectorXd& times, double rel_tol) {
  if (times.size() < 2) return true;
  const double mean_gap =
      (times(times.size() - 1) - times(0)) / double(times.size() - 1);
  for (Eigen::Index t = 1; t < times.size(); ++t)
    if (std::abs(times(t) - times(t - 1) - mean_gap) >
        rel_tol * std::abs(mean_gap))
      return false;
  return true;
}

namespace {

std::vector<double> parse_double_list(const std::string& value,
                                      const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ','))
    out.push_back(parse_double(tok, "config key '" + key + "'"));
  if (out.empty()) throw InvalidInput("config key '" + key + "' is empty");
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(lineno) +
                         " is not key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const std::string ctx = "config key '" + key + "'";
    if (key == "n") {
      cfg.n = int(parse_double(value, ctx));
    } else if (key == "true_means") {
      cfg.true_means = parse_double_list(value, key);
    } else if (key == "noise_sd") {
      cfg.noise_sd = parse_double(value, ctx);
    } else if (key == "factor_loadings") {
      cfg.factor_loadings = parse_double_list(value, key);
    } else if (key == "factor_walk_sd") {
      cfg.factor_spec.walk_sd = parse_double(value, ctx);
    } else if (key == "factor_spikes") {
      cfg.factor_spec.num_spikes = int(parse_double(value, ctx));
    } else if (key == "factor_spike_magnitude") {
      cfg.factor_spec.spike_magnitude = parse_double(value, ctx);
    } else if (key == "replications") {
      cfg.replications = int(parse_double(value, ctx));
    } else if (key == "base_seed") {
      cfg.base_seed = std::uint64_t(parse_double(value, ctx));
    } else if (key == "fourier_cutoff") {
      cfg.fourier_cutoff = parse_double(value, ctx);
    } else if (key == "kalman_mode") {
      if (value == "fixed_ratio") cfg.kalman_mode = KalmanMode::kFixedRatio;
      else if (value == "estimate") cfg.kalman_mode = KalmanMode::kEstimate;
      else if (value == "fixed") cfg.kalman_mode = KalmanMode::kFixed;
      else throw InvalidInput("unknown kalman_mode '" + value + "'");
    } else if (key == "kalman_psi") {
      cfg.kalman_psi = parse_double(value, ctx);
    } else if (key == "kalman_q") {
      cfg.kalman_q = parse_double(value, ctx);
    } else if (key == "kalman_r") {
      cfg.kalman_r = parse_double(value, ctx);
    } else {
      throw InvalidInput("unknown config key '" + key + "' on line " +
                         std::to_string(lineno));
    }
  }
  cfg.validate();
  return cfg;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace cofactor
