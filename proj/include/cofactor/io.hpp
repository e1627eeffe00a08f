#pragma once

#include <string>
#include <vector>

#include "cofactor/simulation.hpp"
#include "cofactor/types.hpp"

namespace cofactor {

struct Interval {
  double t_start = 0;
  double t_end = 0;
  std::string label;

  void validate() const;
};

// CSV contract: comma-separated, mandatory header, '.' decimal separator.
SignalMatrix load_csv(const std::string& path, const std::string& time_column,
                      const std::vector<std::string>& signal_columns);

// Generic table writer; doubles are emitted as shortest round-trip decimals.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows);

// Rows with t_start <= t <= t_end (inclusive); requires >= 10 survivors.
SignalMatrix select_interval(const SignalMatrix& m, const Interval& iv);

// True when consecutive time gaps agree within rel_tol; the Fourier baseline
// requires this and callers must check before filtering.
bool uniform_spacing(const Eigen::VectorXd& times, double rel_tol = 1e-6);

std::string format_double(double v);
double parse_double(const std::string& token, const std::string& context);

// Flat key=value config for the simulate subcommand; unknown keys are errors.
ScenarioConfig parse_scenario_config(const std::string& path);

// FNV-1a 64-bit over the raw file bytes, hex-encoded.
std::string file_digest(const std::string& path);

int run_cli(int argc, char** argv);

}  // namespace cofactor
