#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "arq/markov_chain.hpp"
#include "arq/simulation.hpp"
#include "fixtures.hpp"

using namespace arq;
namespace fx = arq::fixtures;

namespace {

SimConfig quick(std::uint64_t seed, std::int64_t steps = 100'000, int reps = 10) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.steps = steps;
  cfg.burn_in = std::min<std::int64_t>(1000, steps / 10);
  cfg.replications = reps;
  return cfg;
}

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = cdf(x[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

constexpr int kDraws = 100'000;
// Asymptotic 1% critical value of sqrt(n) D.
const double kKsCritical = 1.628 / std::sqrt(static_cast<double>(kDraws));

}  // namespace

TEST_CASE("configuration checks") {
  SimConfig cfg;
  cfg.steps = 100;
  cfg.burn_in = 100;
  try {
    check(cfg);
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpec);
  }
  cfg.burn_in = 10;
  cfg.replications = 0;
  CHECK_THROWS_AS(check(cfg), Error);
}

TEST_CASE("empty system without service") {
  ModelSpec m = fx::two_state(1, 2);
  m.services = {Distribution::deterministic(0.0), Distribution::deterministic(0.0)};
  const StationarySimResult sim = simulate_stationary(m, {1.0}, quick(1));
  CHECK(sim.total_mean.estimate == 0.0);
  double idle = 0.0;
  for (const auto& e : sim.idle) idle += e.estimate;
  CHECK(idle == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sim.total_transform[0].estimate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical seeds reproduce bit-identical estimates") {
  const ModelSpec m = fx::two_state(1, 1);
  SimConfig a = quick(123, 50'000, 6), b = a;
  a.threads = 1;
  b.threads = 3;
  const StationarySimResult x = simulate_stationary(m, {0.5, 1.0}, a);
  const StationarySimResult y = simulate_stationary(m, {0.5, 1.0}, b);
  CHECK(x.total_mean.estimate == y.total_mean.estimate);
  CHECK(x.total_mean.se == y.total_mean.se);
  for (std::size_t p = 0; p < 2; ++p) CHECK(x.total_transform[p].estimate == y.total_transform[p].estimate);
  const StationarySimResult z = simulate_stationary(m, {0.5, 1.0}, quick(124, 50'000, 6));
  CHECK(z.total_mean.estimate != x.total_mean.estimate);
}

TEST_CASE("workload grows with the autoregressive factor") {
  const StationarySimResult lo = simulate_stationary(fx::two_state(1, 2, 1.0, 0.3), {}, quick(9));
  const StationarySimResult hi = simulate_stationary(fx::two_state(1, 2, 1.0, 0.6), {}, quick(9));
  CHECK(hi.total_mean.estimate > lo.total_mean.estimate);
}

TEST_CASE("chain occupancy matches the stationary distribution") {
  std::mt19937_64 rng(2);
  const MarkovChain chain(fx::random_chain(3, rng));
  ModelSpec m = fx::random_spec(fx::Family::Exponential, 3, rng);
  m.chain = chain;
  const StationarySimResult sim = simulate_stationary(m, {}, quick(13));
  const RVector pi = stationary_distribution(chain);
  for (Eigen::Index i = 0; i < 3; ++i)
    CHECK(std::abs(pi(i) - sim.occupancy[static_cast<std::size_t>(i)].estimate) <=
          3.0 * sim.occupancy[static_cast<std::size_t>(i)].se);
}

TEST_CASE("unsupported joints are refused") {
  std::mt19937_64 rng(6);
  const ModelSpec bme = fx::random_spec(fx::Family::Bme, 2, rng);
  try {
    simulate_stationary(bme, {}, quick(1, 1000, 1));
    FAIL("expected UnsupportedSampling");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedSampling);
  }
  ModelSpec rational = fx::two_state(1, 2);
  rational.services[0] = Distribution::rational(RationalLST(Polynomial({4.0}), Polynomial({4.0, 1.0})));
  CHECK_THROWS_AS(simulate_stationary(rational, {}, quick(1, 1000, 1)), Error);
}

TEST_CASE("marginal samplers pass Kolmogorov-Smirnov") {
  Rng rng(31);
  const auto sample = [&](const Distribution& d) {
    std::vector<double> x(kDraws);
    for (double& v : x) v = d.sample(rng);
    return x;
  };
  CHECK(ks_statistic(sample(Distribution::exponential(2.5)), [](double x) { return 1.0 - std::exp(-2.5 * x); }) <
        kKsCritical);
  // Erlang(1) and Erlang(3) at rate 2 with weights 0.4 / 0.6.
  const auto mix_cdf = [](double x) {
    const double e = std::exp(-2.0 * x);
    const double erl3 = 1.0 - e * (1.0 + 2.0 * x + 2.0 * x * x);
    return 0.4 * (1.0 - e) + 0.6 * erl3;
  };
  CHECK(ks_statistic(sample(Distribution::mixed_erlang(2.0, {0.4, 0.0, 0.6})), mix_cdf) < kKsCritical);

  for (double theta : {-1.0, 0.5, 1.0}) {
    std::vector<double> s(kDraws), a(kDraws);
    for (int k = 0; k < kDraws; ++k) std::tie(s[k], a[k]) = sample_fgm_pair(Distribution::exponential(3.0), theta, 1.5, rng);
    CHECK(ks_statistic(s, [](double x) { return 1.0 - std::exp(-3.0 * x); }) < kKsCritical);
    CHECK(ks_statistic(a, [](double x) { return 1.0 - std::exp(-1.5 * x); }) < kKsCritical);
  }
}

TEST_CASE("conditional copula inversion has one root in the unit interval") {
  // u2 + t u2 (1 - u2) = u with t = theta (1 - 2 u1) in [-1, 1].
  for (double t = -1.0; t <= 1.0 + 1e-12; t += 0.05)
    for (double u = 0.0; u <= 1.0 + 1e-12; u += 0.01) {
      int roots = 0;
      if (std::abs(t) < 1e-12) {
        roots = 1;
      } else {
        const double b = 1.0 + t, disc = b * b - 4.0 * t * u;
        REQUIRE(disc >= -1e-12);
        for (double sign : {-1.0, 1.0}) {
          const double r = (b + sign * std::sqrt(std::max(disc, 0.0))) / (2.0 * t);
          if (r >= -1e-12 && r <= 1.0 + 1e-12) ++roots;
        }
        if (std::abs(disc) < 1e-12) roots = std::min(roots, 1);
      }
      CHECK(roots == 1);
    }
}

TEST_CASE("independence copula passes a chi-square test") {
  Rng rng(77);
  int table[4][4] = {};
  for (int k = 0; k < kDraws; ++k) {
    const auto [s, a] = sample_fgm_pair(Distribution::exponential(2.0), 0.0, 5.0, rng);
    const int r = std::min(3, static_cast<int>(4.0 * (1.0 - std::exp(-2.0 * s))));
    const int c = std::min(3, static_cast<int>(4.0 * (1.0 - std::exp(-5.0 * a))));
    ++table[r][c];
  }
  double rows[4] = {}, cols[4] = {};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      rows[r] += table[r][c];
      cols[c] += table[r][c];
    }
  double chi2 = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double expected = rows[r] * cols[c] / kDraws;
      chi2 += (table[r][c] - expected) * (table[r][c] - expected) / expected;
    }
  CHECK(chi2 < 21.666);  // 1% point of chi-square with 9 degrees of freedom
}

TEST_CASE("FGM pair correlation with unit exponential marginals") {
  // Independent reference: E[S A] for the FGM density by nested quadrature.
  using boost::math::quadrature::exp_sinh;
  exp_sinh<double> outer, inner;
  const double theta = 1.0;
  const double esa = outer.integrate([&](double x) {
    return inner.integrate([&](double y) {
      const double fx = std::exp(-x), fy = std::exp(-y);
      return x * y * fx * fy * (1.0 + theta * (2.0 * fx - 1.0) * (2.0 * fy - 1.0));
    });
  });
  const double reference = esa - 1.0;  // unit means and variances
  CHECK(reference == doctest::Approx(0.25).epsilon(1e-8));

  Rng rng(5);
  double ss = 0, sa = 0, ssa = 0, sss = 0, saa = 0;
  for (int k = 0; k < kDraws; ++k) {
    const auto [s, a] = sample_fgm_pair(Distribution::exponential(1.0), theta, 1.0, rng);
    ss += s;
    sa += a;
    ssa += s * a;
    sss += s * s;
    saa += a * a;
  }
  const double n = kDraws;
  const double cov = ssa / n - (ss / n) * (sa / n);
  const double corr = cov / std::sqrt((sss / n - ss * ss / (n * n)) * (saa / n - sa * sa / (n * n)));
  CHECK(std::abs(corr - reference) < 3.0 * 1.2 / std::sqrt(n));
}

TEST_CASE("empirical joint CDF matches the copula") {
  Rng rng(19);
  const double theta = -0.7, mu = 2.0, lambda = 3.0;
  std::vector<std::pair<double, double>> draws(kDraws);
  for (auto& d : draws) d = sample_fgm_pair(Distribution::exponential(mu), theta, lambda, rng);
  for (double x : {0.1, 0.4, 1.0})
    for (double y : {0.1, 0.3, 0.8}) {
      const double u = 1.0 - std::exp(-mu * x), v = 1.0 - std::exp(-lambda * y);
      const double c = u * v * (1.0 + theta * (1.0 - u) * (1.0 - v));
      double hits = 0.0;
      for (const auto& [s, a] : draws) hits += (s <= x && a <= y) ? 1.0 : 0.0;
      const double p = hits / kDraws;
      CHECK(std::abs(p - c) <= 3.0 * std::sqrt(c * (1.0 - c) / kDraws));
    }
}

TEST_CASE("first transient step is deterministic in the workload") {
  const ModulatedArrivalSpec sp = fx::modulated(0.8);
  const double s = 0.6;
  SimConfig cfg = quick(3, 20'000, 5);
  cfg.burn_in = 0;
  const TransientSimResult sim = simulate_transient(sp, fx::modulated_services(), 0.3, 5, s, 0.0, cfg);
  double total = 0.0;
  for (Eigen::Index j = 0; j < 2; ++j) {
    const SimEstimate e = sim.at(1, j);
    total += e.estimate;
    CHECK(std::abs(e.estimate - std::exp(-s * 0.8) * sp.initial(j)) <= 3.0 * e.se + 1e-12);
  }
  CHECK(total == doctest::Approx(std::exp(-s * 0.8)).epsilon(1e-12));
}

TEST_CASE("transient estimates settle for large n") {
  const ModulatedArrivalSpec sp = fx::modulated(0.0);
  SimConfig cfg = quick(8, 20'000, 5);
  cfg.burn_in = 0;
  const TransientSimResult sim = simulate_transient(sp, fx::modulated_services(), 0.3, 60, 0.5, 0.0, cfg);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const SimEstimate a = sim.at(50, j), b = sim.at(60, j);
    CHECK(std::abs(a.estimate - b.estimate) <= 3.0 * std::hypot(a.se, b.se));
  }
}
