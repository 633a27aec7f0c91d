#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "arq/model.hpp"
#include "arq/simulation.hpp"
#include "arq/solution.hpp"
#include "arq/transient.hpp"

namespace arq::app {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Malformed or invalid configuration; `path()` is a JSON pointer into the document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

Json load_json(const std::string& file);

Complex parse_complex(const Json& j, const std::string& path);
RationalLST parse_rational(const Json& j, const std::string& path);
Distribution parse_distribution(const Json& j, const std::string& path);
ModelSpec parse_model(const Json& j, const std::string& path = "");
SimConfig parse_sim_config(const Json& j, const std::string& path);

/// Transient batch: a modulated-arrival spec or a service-linked dependence, plus (r, s, eta) queries.
struct TransientConfig {
  bool service_linked = false;
  ModulatedArrivalSpec modulated;
  ServiceLinkedDependence linked;
  RVector initial;
  double w = 0.0;
  std::vector<Distribution> services;
  double a = 0.5;
  std::vector<TransientQuery> queries;
};
TransientConfig parse_transient(const Json& j, const std::string& path);

/// Throws ConfigError naming the first violated invariant.
void require_valid_config(const ModelSpec& spec, const std::string& path = "");
void require_valid_config(const TransientConfig& cfg, const std::string& path);

TransientResult run_transient_query(const TransientConfig& cfg, const TransientQuery& q, const TruncationPolicy& policy);

OrderedJson complex_json(Complex z);
OrderedJson vector_json(const CVector& v);
OrderedJson vector_json(const RVector& v);
OrderedJson estimate_json(const SimEstimate& e);

/// Boundary vector, diagnostics, warnings, means and the transform table at `points`.
OrderedJson solution_json(const StationarySolution& sol, const std::vector<double>& points);
/// Header s,Z1_re,Z1_im,... then one row per point.
std::string transform_table_csv(const StationarySolution& sol, const std::vector<double>& points);

/// Columns r,s_re,s_im,eta_re,eta_im,state,Z_re,Z_im,terms_used; one row per query and state.
std::string transient_csv(const std::vector<TransientQuery>& queries, const std::vector<TransientResult>& results);

}  // namespace arq::app
