#pragma once

#include <random>

#include "arq/model.hpp"
#include "arq/polynomial.hpp"
#include "arq/transient.hpp"

namespace arq::fixtures {

inline RMatrix swap_chain() {
  RMatrix p(2, 2);
  p << 0, 1, 1, 0;
  return p;
}

inline RMatrix half_chain() {
  RMatrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  return p;
}

/// lambda = [2, 8]; services [4, 10] / u (example 1) or [10, 4] / u (example 2).
/// Case 1 alternates states, case 2 draws them independently.
inline ModelSpec two_state(int example, int chain_case, double u = 1.0, double a = 0.3) {
  ModelSpec m;
  m.chain = MarkovChain(chain_case == 1 ? swap_chain() : half_chain());
  m.arrivals = ExponentialArrivals{{2.0, 8.0}};
  const double mu1 = example == 1 ? 4.0 : 10.0;
  const double mu2 = example == 1 ? 10.0 : 4.0;
  m.services = {Distribution::exponential(mu1 / u), Distribution::exponential(mu2 / u)};
  m.a = a;
  return m;
}

/// f / g = mu lambda / ((mu + s)(lambda - s)), the transform of S - A for independent exponentials.
inline RationalLST exp_difference(double mu, double lambda) {
  return RationalLST(Polynomial({mu * lambda}), Polynomial({mu, 1.0}) * Polynomial({lambda, -1.0}));
}

/// Pair-dependent exponential service and interarrival rates, S = Exp(mu_ij) + C and
/// A = Exp(lambda_ij) + C with a common Exp(3) shift that cancels in S - A.
inline ModelSpec pair_dependent_bme() {
  ModelSpec m;
  m.chain = MarkovChain(half_chain());
  m.arrivals = ExponentialArrivals{{2.0, 8.0}};
  m.services = {Distribution::exponential(4.0), Distribution::exponential(10.0)};
  m.a = 0.3;
  const double mu[2][2] = {{4.0, 6.0}, {10.0, 5.0}};
  const double lam[2][2] = {{2.0, 7.0}, {3.0, 8.0}};
  BmeDependence b;
  b.pairs.resize(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      b.pairs[i].push_back(BmePair{exp_difference(mu[i][j], lam[i][j]),
                                   BmeSampler{Distribution::exponential(mu[i][j]), Distribution::exponential(lam[i][j]),
                                              Distribution::exponential(3.0)}});
  m.dependence = b;
  return m;
}

inline ModelSpec shot_noise() {
  ModelSpec m;
  m.chain = MarkovChain(half_chain());
  m.arrivals = DeterministicArrivals{1.0};
  m.services = {Distribution::exponential(1.0), Distribution::exponential(1.0)};
  m.kind = ShotNoiseKind{0.5, 0.5, {Distribution::exponential(3.0), Distribution::exponential(5.0)}, {2.0, 4.0}};
  return m;
}

inline ModelSpec wait_dependent(double c = 0.5) {
  ModelSpec m;
  m.chain = MarkovChain(half_chain());
  m.arrivals = ExponentialArrivals{{2.0, 8.0}};
  m.services = {Distribution::exponential(5.0), Distribution::exponential(5.0)};
  m.kind = WaitDependentKind{c, 5.0};
  return m;
}

inline ModulatedArrivalSpec modulated(double w = 0.5) {
  ModulatedArrivalSpec s;
  s.generator.resize(2, 2);
  s.generator << -1, 1, 2, -2;
  s.rates = {2.0, 8.0};
  s.initial = RVector::Constant(2, 0.5);
  s.w = w;
  return s;
}

inline std::vector<Distribution> modulated_services() {
  return {Distribution::exponential(4.0), Distribution::exponential(10.0)};
}

/// Random irreducible chain with strictly positive entries.
inline RMatrix random_chain(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RMatrix p(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

inline std::vector<double> uniform_vector(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

enum class Family { Exponential, MixedErlang, Fgm, Bme, ShotNoise, WaitDependent };

inline const char* name(Family f) {
  switch (f) {
    case Family::Exponential: return "exponential";
    case Family::MixedErlang: return "mixed-Erlang";
    case Family::Fgm: return "FGM";
    case Family::Bme: return "BME";
    case Family::ShotNoise: return "shot-noise";
    case Family::WaitDependent: return "wait-dependent";
  }
  return "";
}

/// Random valid spec of the given family with N states.
inline ModelSpec random_spec(Family f, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelSpec m;
  m.chain = MarkovChain(random_chain(n, rng));
  const auto lam = uniform_vector(n, 1.0, 9.0, rng);
  m.arrivals = ExponentialArrivals{lam};
  for (double mu : uniform_vector(n, 2.0, 12.0, rng)) m.services.push_back(Distribution::exponential(mu));
  m.a = 0.1 + 0.6 * u(rng);
  switch (f) {
    case Family::Exponential:
      break;
    case Family::MixedErlang: {
      const int phases = 1 + static_cast<int>(u(rng) * 3.0);
      auto w = uniform_vector(phases, 0.1, 1.0, rng);
      double total = 0.0;
      for (double x : w) total += x;
      for (double& x : w) x /= total;
      m.arrivals = MixedErlangArrivals{lam, w};
      break;
    }
    case Family::Fgm:
      m.dependence = FgmDependence{2.0 * u(rng) - 1.0};
      break;
    case Family::Bme: {
      BmeDependence b;
      b.pairs.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          b.pairs[static_cast<std::size_t>(i)].push_back(
              BmePair{exp_difference(2.0 + 10.0 * u(rng), 1.0 + 8.0 * u(rng)), std::nullopt});
      m.dependence = b;
      break;
    }
    case Family::ShotNoise: {
      m.arrivals = DeterministicArrivals{0.5 + 1.5 * u(rng)};
      ShotNoiseKind k;
      k.r = 0.2 + 0.8 * u(rng);
      k.p = u(rng);
      for (double rate : uniform_vector(n, 1.0, 6.0, rng)) k.jumps.push_back(Distribution::exponential(rate));
      k.negative_rates = uniform_vector(n, 1.0, 5.0, rng);
      m.kind = k;
      break;
    }
    case Family::WaitDependent: {
      const double mu = 2.0 + 6.0 * u(rng);
      m.services.assign(static_cast<std::size_t>(n), Distribution::exponential(mu));
      m.kind = WaitDependentKind{0.2 + 0.8 * u(rng), mu};
      break;
    }
  }
  return m;
}

}  // namespace arq::fixtures
