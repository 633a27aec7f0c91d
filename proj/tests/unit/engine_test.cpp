#include <doctest.h>

#include "arq/stationary.hpp"
#include "arq/transform_engine.hpp"
#include "fixtures.hpp"

using namespace arq;
namespace fx = arq::fixtures;

namespace {

MatrixFunction scalar(std::function<Jet(const Jet&)> f) {
  return [f](const Jet& s) { return MatrixJet::from_entries(1, 1, s.order(), [&](Eigen::Index, Eigen::Index) { return f(s); }); };
}

CVector one(Complex x) { return CVector::Constant(1, x); }

}  // namespace

TEST_CASE("geometric series") {
  // Translate maps also require the factor norm below 1/2 before stopping.
  const auto H = scalar([](const Jet&) { return Jet(0.4); });
  const auto V = scalar([](const Jet&) { return Jet(1.0); });
  for (const ShiftMap& zeta : {ShiftMap::scale(0.3), ShiftMap::exp_scale(1.0, 0.5), ShiftMap::translate(0.7)}) {
    const TransformResult r = iterate_fixed_point(H, V, zeta, CVector(), 0.4, {1e-12, 1000});
    CHECK(std::abs(r.value(0) - 1.0 / 0.6) < 1e-11);
    CHECK(r.residual <= 1e-12);
  }
}

TEST_CASE("product tail with a stochastic transpose keeps the stationary vector") {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 4; ++n) {
    const MarkovChain chain(fx::random_chain(n, rng));
    const RVector pi = stationary_distribution(chain);
    const CMatrix pt = chain.transition().transpose().cast<Complex>();
    const MatrixFunction H = [pt](const Jet&) { return MatrixJet(pt); };
    const CVector out = product_tail(H, ShiftMap::scale(0.5), pi.cast<Complex>(), 0.8, {1e-12, 1000});
    CHECK(max_abs(CVector(out - pi.cast<Complex>())) < 1e-12);
  }
}

TEST_CASE("derivative of an infinite product") {
  const auto H = scalar([](const Jet& s) { return exp(-s); });
  const auto V = scalar([](const Jet& s) { return Jet(0.0, s.order()); });
  const CVector d = derivative_series(1, H, V, ShiftMap::scale(0.5), one(1.0), 0.0, {1e-13, 1000});
  CHECK(std::abs(d(0) + 2.0) < 1e-10);
}

TEST_CASE("zeroth derivative is the value") {
  const auto H = scalar([](const Jet& s) { return Jet(0.6) / (Jet(1.0) + s); });
  const auto V = scalar([](const Jet& s) { return Jet(1.0) / (Jet(2.0) + s); });
  const TruncationPolicy p{1e-10, 1000};
  for (Complex s : {Complex(0.3), Complex(1.2, -0.7)}) {
    const CVector v = iterate_fixed_point(H, V, ShiftMap::scale(0.4), one(0.5), s, p).value;
    const CVector d0 = derivative_series(0, H, V, ShiftMap::scale(0.4), one(0.5), s, p);
    CHECK(std::abs(v(0) - d0(0)) == 0.0);
  }
}

TEST_CASE("first derivative agrees with central differences") {
  const auto H = scalar([](const Jet& s) { return Jet(0.6) * exp(-s) / (Jet(1.0) + s); });
  const auto V = scalar([](const Jet& s) { return s / (Jet(2.0) + s); });
  const TruncationPolicy p{1e-14, 1000};
  const ShiftMap zeta = ShiftMap::scale(0.4);
  for (Complex s : {Complex(0.3), Complex(1.1), Complex(0.8, 0.6)}) {
    const double h = 1e-6;
    const Complex fd = (iterate_fixed_point(H, V, zeta, one(1.0), s + h, p).value(0) -
                        iterate_fixed_point(H, V, zeta, one(1.0), s - h, p).value(0)) /
                       (2.0 * h);
    const Complex d = derivative_series(1, H, V, zeta, one(1.0), s, p)(0);
    CHECK(std::abs(d - fd) <= 1e-5 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("orbit through a registered pole") {
  const auto H = scalar([](const Jet&) { return Jet(0.5); });
  const auto V = scalar([](const Jet&) { return Jet(1.0); });
  try {
    iterate_fixed_point(H, V, ShiftMap::scale(0.5), CVector(), 1.0, {}, {Complex(0.25)});
    FAIL("expected PoleOnOrbit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleOnOrbit);
  }
  CHECK(preimage_distance(ShiftMap::scale(0.5), {Complex(0.25)}, 1.0) < 1e-12);
}

TEST_CASE("divergent series hits the term limit") {
  const auto H = scalar([](const Jet&) { return Jet(1.0); });
  const auto V = scalar([](const Jet&) { return Jet(1.0); });
  try {
    iterate_fixed_point(H, V, ShiftMap::scale(0.5), CVector(), 1.0, {1e-7, 50});
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoConvergence);
  }
}

TEST_CASE("halving the tolerance moves the value by less than the old tolerance") {
  // H(0) = 1 as for a stochastic transpose; successive increments shrink by about a = 0.4.
  // With a ratio above 1/2 the tail left by the increment rule can exceed the tolerance.
  const auto H = scalar([](const Jet& s) { return Jet(1.0) / (Jet(1.0) + s); });
  const auto V = scalar([](const Jet& s) { return s / (Jet(1.0) + s); });
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    for (Complex s : {Complex(0.5), Complex(2.0, 1.0)}) {
      const Complex a = iterate_fixed_point(H, V, ShiftMap::scale(0.4), one(1.0), s, {tol, 10000}).value(0);
      const Complex b = iterate_fixed_point(H, V, ShiftMap::scale(0.4), one(1.0), s, {tol / 2, 10000}).value(0);
      CHECK(std::abs(a - b) < tol);
    }
  }
}

TEST_CASE("environment override of the tolerance") {
  ::setenv(kToleranceEnvVar, "3e-9", 1);
  CHECK(TruncationPolicy::from_environment().tolerance == 3e-9);
  ::unsetenv(kToleranceEnvVar);
  CHECK(TruncationPolicy::from_environment().tolerance == 1e-7);
}

TEST_CASE("stationary construction normalizes at zero and counts terms at a=0.1") {
  const StationarySolution sol = solve_exponential(fx::two_state(1, 2, 2.5, 0.1), {1e-7, 10000});
  const TransformResult z0 = sol.evaluate(0.0);
  CHECK(max_abs(CVector(z0.value - sol.pi().cast<Complex>())) < 1e-8);
  const ProductFormCounts counts = product_form_counts(fx::two_state(1, 2, 2.5, 0.1), {1e-7, 10000});
  for (int c : counts.sums) {
    CHECK(c >= 7);
    CHECK(c <= 9);
  }
}
