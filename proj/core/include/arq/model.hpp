#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arq/distribution.hpp"
#include "arq/markov_chain.hpp"
#include "arq/polynomial.hpp"

namespace arq {

struct ExponentialArrivals {
  std::vector<double> rates;
};
/// Interarrival in state j is Erlang(m, rates[j]) with probability weights[m-1].
struct MixedErlangArrivals {
  std::vector<double> rates;
  std::vector<double> weights;
};
/// Fixed interarrival time, used by the shot-noise model.
struct DeterministicArrivals {
  double t;
};
using ArrivalSpec = std::variant<ExponentialArrivals, MixedErlangArrivals, DeterministicArrivals>;

struct IndependentDependence {};
struct FgmDependence {
  double theta;
};
/// Explicit construction S = service + common, A = interarrival + common.
struct BmeSampler {
  Distribution service;
  Distribution interarrival;
  std::optional<Distribution> common;
};
/// Transform of S - A for one (current, next) state pair.
struct BmePair {
  RationalLST joint;
  std::optional<BmeSampler> sampler;
};
struct BmeDependence {
  std::vector<std::vector<BmePair>> pairs;  ///< pairs[i][j]
};
/// Interarrival given service length t has transform chi_ij(s) exp(-psi_i(s) t).
struct ServiceLinkedDependence {
  std::vector<std::vector<RationalLST>> chi;
  std::vector<RationalLST> psi;
};
using DependenceSpec = std::variant<IndependentDependence, FgmDependence, BmeDependence, ServiceLinkedDependence>;

struct AutoregressiveKind {};
/// W' = [exp(-r t)(W + S) + C]^+, C ~ jump_j w.p. p else -Exp(negative_rates[j]).
struct ShotNoiseKind {
  double r;
  double p;
  std::vector<Distribution> jumps;
  std::vector<double> negative_rates;
};
/// W' = [W + [S - cW]^+ - A]^+ with S ~ Exp(mu).
struct WaitDependentKind {
  double c;
  double mu;
};
using ModelKind = std::variant<AutoregressiveKind, ShotNoiseKind, WaitDependentKind>;

struct ModelSpec {
  MarkovChain chain;
  ArrivalSpec arrivals;
  std::vector<Distribution> services;
  DependenceSpec dependence = IndependentDependence{};
  double a = 0.5;
  ModelKind kind = AutoregressiveKind{};

  Eigen::Index n_states() const { return chain.n_states(); }
};

/// Violated invariants; an empty list means the spec is valid.
std::vector<std::string> validate(const ModelSpec& spec);
/// Throws InvalidSpec (or the chain's own error code) on the first violation.
void require_valid(const ModelSpec& spec);

/// Per-state rates for exponential or mixed-Erlang arrivals.
const std::vector<double>& arrival_rates(const ModelSpec& spec);

}  // namespace arq
