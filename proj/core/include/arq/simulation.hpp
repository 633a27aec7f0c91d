#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "arq/model.hpp"
#include "arq/rng.hpp"
#include "arq/transient.hpp"

namespace arq {

struct SimConfig {
  std::uint64_t seed = 20240607;
  /// Recursion steps per replication (stationary) or paths per replication (transient).
  std::int64_t steps = 1'000'000;
  std::int64_t burn_in = 10'000;
  int replications = 20;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
};
/// Throws InvalidSpec when burn_in >= steps or replications < 1.
void check(const SimConfig& cfg);

struct SimEstimate {
  double estimate = 0.0;
  double se = 0.0;
  int replications = 0;
};
/// Mean and standard error of per-replication values.
SimEstimate summarize(const std::vector<double>& per_replication);

struct StationarySimResult {
  std::vector<SimEstimate> mean;                    ///< E[W 1{Y=i}]
  SimEstimate total_mean;                           ///< E[W]
  std::vector<double> points;                       ///< real transform arguments
  std::vector<std::vector<SimEstimate>> transform;  ///< [point][state] E[exp(-sW) 1{Y=i}]
  std::vector<SimEstimate> total_transform;         ///< [point] E[exp(-sW)]
  std::vector<SimEstimate> idle;                    ///< P(W = 0, Y = j)
  std::vector<SimEstimate> occupancy;               ///< P(Y = i)
};

/// Time averages of the stationary recursion selected by the spec's model kind.
/// Throws UnsupportedSampling when a distribution or joint has no sampler.
StationarySimResult simulate_stationary(const ModelSpec& spec, const std::vector<double>& points, const SimConfig& cfg);

/// (S, A) given current state i and next state j under the FGM copula with
/// exponential(lambda_j) interarrivals; the conditional copula is inverted in closed form.
std::pair<double, double> sample_fgm_pair(const Distribution& service, double theta, double lambda_j, Rng& rng);

struct TransientSimResult {
  int replications = 0;
  Eigen::Index n_states = 0;
  int horizon = 0;
  /// values[rep][(n - 1) * N + j] = replication average of exp(-s W_n - eta T_n) 1{Y_n = j}.
  std::vector<std::vector<double>> values;

  SimEstimate at(int n, Eigen::Index j) const;
  /// sum_{n <= horizon} r^n E[exp(-s W_n - eta T_n) 1{Y_n = j}], SE across replications.
  std::vector<SimEstimate> weighted_sum(double r) const;
};

/// Fresh paths of the Markov-modulated recursion started from W_1 = w, Y_1 ~ initial.
TransientSimResult simulate_transient(const ModulatedArrivalSpec& spec, const std::vector<Distribution>& services,
                                      double a, int horizon, double s, double eta, const SimConfig& cfg);

/// Service-linked variant. Needs chi_ij(s) = chi_ij(0) l / (l + s) (or a constant) and
/// psi_i(s) = k s / (s + d) (or zero): the interarrival given S = t is then
/// Exp(l) plus a Poisson(k t) number of Exp(d) delays.
TransientSimResult simulate_transient_service_linked(const ServiceLinkedDependence& dependence, const RVector& initial,
                                                     double w, const std::vector<Distribution>& services, double a,
                                                     int horizon, double s, double eta, const SimConfig& cfg);

}  // namespace arq
