#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arq/jet.hpp"
#include "arq/polynomial.hpp"
#include "arq/rng.hpp"

namespace arq {

/// Nonnegative random variable described by its LST.
///
/// Supported families: exponential, mixture of Erlangs sharing one rate,
/// point mass, and a general rational LST (evaluation only).
class Distribution {
 public:
  struct Exponential {
    double rate;
  };
  /// weights[m-1] is the probability of an Erlang(m, rate) phase count.
  struct MixedErlang {
    double rate;
    std::vector<double> weights;
  };
  struct Deterministic {
    double value;
  };
  struct Rational {
    RationalLST lst;
  };
  using Variant = std::variant<Exponential, MixedErlang, Deterministic, Rational>;

  Distribution() : v_(Deterministic{0.0}) {}
  explicit Distribution(Variant v) : v_(std::move(v)) {}

  static Distribution exponential(double rate) { return Distribution(Exponential{rate}); }
  static Distribution mixed_erlang(double rate, std::vector<double> weights) {
    return Distribution(MixedErlang{rate, std::move(weights)});
  }
  static Distribution deterministic(double value) { return Distribution(Deterministic{value}); }
  static Distribution rational(RationalLST lst) { return Distribution(Rational{std::move(lst)}); }

  const Variant& variant() const noexcept { return v_; }
  std::string family() const;

  /// Invariant violations of the parameters (empty when valid).
  std::vector<std::string> check() const;

  Jet lst(const Jet& s) const;
  Complex lst(Complex s) const { return lst(Jet(s)).value(); }

  /// Transform of f(x)(1 - 2F(x)); available for families with a density.
  bool has_density() const;
  Jet fgm_kernel(const Jet& s) const;

  double mean() const;
  double second_moment() const;
  /// Integral of F(x)(1 - F(x)) over x >= 0.
  double spread_integral() const;

  bool has_cdf() const;
  double cdf(double x) const;

  bool samplable() const;
  double sample(Rng& rng) const;

  /// Rational form of the LST when one exists.
  std::optional<RationalLST> as_rational() const;

 private:
  Variant v_;
};

}  // namespace arq
