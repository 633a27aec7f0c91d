#include <doctest.h>

#include "arq/related.hpp"
#include "arq/simulation.hpp"
#include "arq/stationary.hpp"
#include "fixtures.hpp"

using namespace arq;
namespace fx = arq::fixtures;

namespace {

SimConfig quick(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.steps = 100'000;
  cfg.replications = 20;
  return cfg;
}

bool within_3se(double value, const SimEstimate& e) { return std::abs(value - e.estimate) <= 3.0 * e.se; }

}  // namespace

TEST_CASE("shot-noise solution normalizes and is bounded by pi") {
  const StationarySolution sol = solve_shotnoise(fx::shot_noise());
  CHECK(max_abs(CVector(sol.evaluate(0.0).value - sol.pi().cast<Complex>())) < 1e-8);
  CVector prev = sol.pi().cast<Complex>();
  for (double s = 0.25; s <= 10.0; s += 0.25) {
    const CVector z = sol.evaluate(s).value;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      CHECK(z(i).real() <= sol.pi()(i) + 1e-9);
      CHECK(z(i).real() <= prev(i).real() + 1e-9);
    }
    prev = z;
  }
}

TEST_CASE("shot-noise without negative jumps matches the scalar recursion") {
  ModelSpec m;
  m.chain = MarkovChain(RMatrix::Ones(1, 1));
  m.arrivals = DeterministicArrivals{1.0};
  m.services = {Distribution::exponential(2.0)};
  m.kind = ShotNoiseKind{0.7, 1.0, {Distribution::deterministic(0.0)}, {1.0}};
  const StationarySolution sol = solve_shotnoise(m);
  const StationarySimResult sim = simulate_stationary(m, {1.0}, quick(17));
  CHECK(within_3se(sol.mean().sum(), sim.total_mean));
  CHECK(within_3se(sol.evaluate(1.0).value.sum().real(), sim.total_transform[0]));
}

TEST_CASE("shot-noise with jumps of both signs matches simulation") {
  const ModelSpec m = fx::shot_noise();
  const StationarySolution sol = solve_shotnoise(m);
  const StationarySimResult sim = simulate_stationary(m, {}, quick(23));
  CHECK(within_3se(sol.mean().sum(), sim.total_mean));
}

TEST_CASE("wait-dependent spectrum") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const ModelSpec m = fx::random_spec(fx::Family::WaitDependent, 1 + trial % 4, rng);
    const WaitDepSpectrum sp = waitdep_spectrum(m);
    CHECK(std::abs(sp.gamma(0)) < 1e-10);
    for (Eigen::Index i = 1; i < sp.gamma.size(); ++i) CHECK(sp.gamma(i).real() > 0.0);
  }
}

TEST_CASE("wait-dependent normalization and idle probability") {
  const ModelSpec m = fx::wait_dependent(0.5);
  const StationarySolution sol = solve_waitdep(m);
  CHECK(max_abs(CVector(sol.evaluate(0.0).value - sol.pi().cast<Complex>())) < 1e-8);
  const Complex idle = sol.boundary().values.sum();
  CHECK(std::abs(idle.imag()) < 1e-9);
  CHECK(idle.real() > 0.0);
  CHECK(idle.real() < 1.0);

  const StationarySimResult sim = simulate_stationary(m, {}, quick(29));
  CHECK(within_3se(sol.mean().sum(), sim.total_mean));
  // Per-state estimates share replications; the sum of their SEs bounds the SE of the total.
  double est = 0.0, se = 0.0;
  for (const auto& e : sim.idle) {
    est += e.estimate;
    se += e.se;
  }
  CHECK(std::abs(idle.real() - est) <= 3.0 * se);
}

TEST_CASE("small discount") {
  // The translated orbit crosses the spectrum in steps of mu c, so the boundary system
  // loses conditioning roughly exponentially in 1/c.
  const ModelSpec m = fx::wait_dependent(0.05);
  const StationarySolution sol = solve_waitdep(m);
  CHECK(sol.boundary().condition_number < 1e6);
  const StationarySimResult sim = simulate_stationary(m, {0.5, 2.0}, quick(31));
  CHECK(within_3se(sol.evaluate(0.5).value.sum().real(), sim.total_transform[0]));
  CHECK(within_3se(sol.evaluate(2.0).value.sum().real(), sim.total_transform[1]));

  // Near the undiscounted limit the solver reports failure instead of a value.
  CHECK_THROWS_AS(solve_waitdep(fx::wait_dependent(1e-6)), Error);
}

TEST_CASE("wait-dependent evaluator is continuous near the spectrum") {
  const ModelSpec m = fx::wait_dependent(0.5);
  const StationarySolution sol = solve_waitdep(m);
  const WaitDepSpectrum sp = waitdep_spectrum(m);
  for (Eigen::Index i = 1; i < sp.gamma.size(); ++i) {
    const double g = sp.gamma(i).real();
    const CVector lo = sol.evaluate(g - 1e-3).value, hi = sol.evaluate(g + 1e-3).value;
    CHECK(lo.allFinite());
    CHECK(max_abs(CVector(hi - lo)) < 1e-2);
  }
}

TEST_CASE("wait-dependent solver is self-consistent under tolerance halving") {
  const ModelSpec m = fx::wait_dependent(0.5);
  for (double tol : {1e-5, 1e-6, 1e-7}) {
    const StationarySolution a = solve_waitdep(m, {tol, 10000}), b = solve_waitdep(m, {tol / 2, 10000});
    for (double s : {0.0, 0.5, 1.5, 4.0}) CHECK(max_abs(CVector(a.evaluate(s).value - b.evaluate(s).value)) < tol);
  }
}

TEST_CASE("shot-noise truncation error follows the contraction ratio") {
  // Terms shrink by k = exp(-r t) per step, so the increment rule leaves a tail of about
  // tol k / (1 - k). Halving stays within the old tolerance when k <= 1/2.
  ModelSpec fast = fx::shot_noise();
  std::get<ShotNoiseKind>(fast.kind).r = 1.0;
  ModelSpec slow = fx::shot_noise();
  const double k_slow = std::exp(-std::get<ShotNoiseKind>(slow.kind).r);
  for (double tol : {1e-5, 1e-6, 1e-7}) {
    const StationarySolution a = solve_shotnoise(fast, {tol, 10000}), b = solve_shotnoise(fast, {tol / 2, 10000});
    const StationarySolution c = solve_shotnoise(slow, {tol, 10000}), d = solve_shotnoise(slow, {tol / 2, 10000});
    for (double s : {0.0, 0.5, 1.5, 4.0}) {
      CHECK(max_abs(CVector(a.evaluate(s).value - b.evaluate(s).value)) < tol);
      CHECK(max_abs(CVector(c.evaluate(s).value - d.evaluate(s).value)) < tol / (1.0 - k_slow));
    }
  }
}
