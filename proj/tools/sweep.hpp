#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csv.hpp"

namespace arq::app {

/// One swept parameter over a grid, applied to one or more named base models.
///
/// Parameters: "u" divides every service rate (and the wait-dependent mu),
/// "theta" sets the FGM parameter, "a" sets the autoregressive factor.
struct SweepSpec {
  std::vector<std::pair<std::string, ModelSpec>> curves;
  std::string parameter;
  std::vector<double> values;
  bool means = true;
  bool correlations = false;
  bool counts = false;
  bool oracle = false;
  SimConfig sim;
  int threads = 0;
};

/// `base_dir` resolves relative "base" model paths.
SweepSpec parse_sweep(const Json& j, const std::string& base_dir);

ModelSpec apply_parameter(const ModelSpec& base, const std::string& parameter, double value);

struct SweepResult {
  CsvTable table;
  int failed_rows = 0;
};
/// Rows run in parallel and are emitted in grid order; a failing row keeps its
/// error text in the status column and the remaining rows still run.
SweepResult run_sweep(const SweepSpec& sweep, const TruncationPolicy& policy);

}  // namespace arq::app
