#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frsf/asymptotics.hpp"

namespace frsf {

struct RunConfig {
  std::string command;  // solve | sweep | certify | bubble | epsstar | limit

  int N = 1;
  double s = 0.45;
  double p = 3.0;
  double q = 6.0;
  double eps = 0.01;
  int M = 4096;
  double L = 60.0;

  std::vector<double> eps_list;  // explicit sweep values (descending)
  double eps_max = 0.0, eps_min = 0.0;
  int eps_count = 0;  // geometric sweep when eps_list empty

  MinimizeOptions minimize;
  std::string init = "gaussian";  // gaussian | bubble
  double init_lambda = 2.0, init_width = 0.0, init_amplitude = 1.0;

  int limit_M = 0;       // grid override for the limit solve
  double limit_L = 0.0;

  std::string output_dir = "out";
  bool emit_fields = false;
  bool emit_plots = false;
  unsigned seed = 0;

  std::string field_path;  // certify input
  double theta = 1.0;      // certify multiplier

  ProblemParams params() const;
  Grid grid() const;
  std::vector<double> resolved_eps_list() const;
};

/// args excludes the program name; args[0] is the command.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the command; 0 success, 2 partial sweep failure, throws on
/// hard errors (the CLI maps those to exit 1).
int run(const RunConfig& cfg);

std::string csv_header();
std::string csv_row(const SweepRecord& rec);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string format_g17(double v);

}  // namespace frsf
