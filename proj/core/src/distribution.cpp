#include "arq/distribution.hpp"

#include <cmath>
#include <numeric>

namespace arq {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// c_l with 1 - F(x) = exp(-rate x) sum_l c_l x^l.
std::vector<double> erlang_survival_coeffs(const Distribution::MixedErlang& d) {
  const int m_max = static_cast<int>(d.weights.size());
  std::vector<double> c(static_cast<std::size_t>(m_max), 0.0);
  for (int l = 0; l < m_max; ++l) {
    double tail = 0.0;
    for (int m = l + 1; m <= m_max; ++m) tail += d.weights[static_cast<std::size_t>(m - 1)];
    c[static_cast<std::size_t>(l)] = std::pow(d.rate, l) / factorial(l) * tail;
  }
  return c;
}

}  // namespace

std::string Distribution::family() const {
  return std::visit(Overloaded{[](const Exponential&) { return std::string("exponential"); },
                               [](const MixedErlang&) { return std::string("mixed_erlang"); },
                               [](const Deterministic&) { return std::string("deterministic"); },
                               [](const Rational&) { return std::string("rational"); }},
                    v_);
}

std::vector<std::string> Distribution::check() const {
  std::vector<std::string> out;
  std::visit(Overloaded{
                 [&](const Exponential& d) {
                   if (!(d.rate > 0) || !std::isfinite(d.rate)) out.emplace_back("exponential rate must be positive");
                 },
                 [&](const MixedErlang& d) {
                   if (!(d.rate > 0) || !std::isfinite(d.rate)) out.emplace_back("Erlang rate must be positive");
                   if (d.weights.empty()) out.emplace_back("Erlang mixture needs at least one weight");
                   double sum = 0.0;
                   for (double w : d.weights) {
                     if (!(w >= 0)) out.emplace_back("Erlang mixture weights must be nonnegative");
                     sum += w;
                   }
                   if (std::abs(sum - 1.0) > 1e-12) out.emplace_back("Erlang mixture weights must sum to 1");
                 },
                 [&](const Deterministic& d) {
                   if (!(d.value >= 0) || !std::isfinite(d.value)) out.emplace_back("deterministic value must be nonnegative");
                 },
                 [&](const Rational& d) {
                   if (!d.lst.unit_at_zero(1e-12)) out.emplace_back("rational LST must equal 1 at s=0");
                   if (d.lst.numerator().degree() > d.lst.denominator().degree())
                     out.emplace_back("rational LST must be proper");
                 }},
             v_);
  return out;
}

Jet Distribution::lst(const Jet& s) const {
  return std::visit(Overloaded{[&](const Exponential& d) { return Jet(d.rate) / (Jet(d.rate) + s); },
                               [&](const MixedErlang& d) {
                                 const Jet base = Jet(d.rate) / (Jet(d.rate) + s);
                                 Jet acc(0.0, s.order());
                                 Jet p(1.0, s.order());
                                 for (double w : d.weights) {
                                   p *= base;
                                   acc += Jet(w) * p;
                                 }
                                 return acc;
                               },
                               [&](const Deterministic& d) { return exp(Jet(-d.value) * s); },
                               [&](const Rational& d) { return d.lst(s); }},
                    v_);
}

bool Distribution::has_density() const {
  return std::holds_alternative<Exponential>(v_) || std::holds_alternative<MixedErlang>(v_);
}

Jet Distribution::fgm_kernel(const Jet& s) const {
  if (const auto* e = std::get_if<Exponential>(&v_)) {
    const Jet mu(e->rate);
    return Jet(2.0 * e->rate) / (Jet(2.0 * e->rate) + s) - mu / (mu + s);
  }
  if (const auto* d = std::get_if<MixedErlang>(&v_)) {
    // f(1 - F) is a combination of x^n exp(-2 rate x) terms.
    const int m_max = static_cast<int>(d->weights.size());
    const auto c = erlang_survival_coeffs(*d);
    const Jet base = reciprocal(Jet(2.0 * d->rate) + s);
    Jet acc(0.0, s.order());
    for (int m = 1; m <= m_max; ++m) {
      const double wm = d->weights[static_cast<std::size_t>(m - 1)];
      if (wm == 0.0) continue;
      const double dens = wm * std::pow(d->rate, m) / factorial(m - 1);
      for (int l = 0; l < m_max; ++l) {
        const int n = m - 1 + l;
        acc += Jet(dens * c[static_cast<std::size_t>(l)] * factorial(n)) * pow(base, n + 1);
      }
    }
    return Jet(2.0) * acc - lst(s);
  }
  throw Error(ErrorCode::InvalidSpec, "FGM dependence needs a service family with a density, got " + family());
}

double Distribution::mean() const {
  return std::visit(Overloaded{[](const Exponential& d) { return 1.0 / d.rate; },
                               [](const MixedErlang& d) {
                                 double m = 0.0;
                                 for (std::size_t k = 0; k < d.weights.size(); ++k)
                                   m += d.weights[k] * static_cast<double>(k + 1) / d.rate;
                                 return m;
                               },
                               [](const Deterministic& d) { return d.value; },
                               [](const Rational& d) { return -d.lst(Jet::variable(0.0, 1))[1].real(); }},
                    v_);
}

double Distribution::second_moment() const {
  return std::visit(Overloaded{[](const Exponential& d) { return 2.0 / (d.rate * d.rate); },
                               [](const MixedErlang& d) {
                                 double m = 0.0;
                                 for (std::size_t k = 0; k < d.weights.size(); ++k) {
                                   const double n = static_cast<double>(k + 1);
                                   m += d.weights[k] * n * (n + 1.0) / (d.rate * d.rate);
                                 }
                                 return m;
                               },
                               [](const Deterministic& d) { return d.value * d.value; },
                               [](const Rational& d) { return 2.0 * d.lst(Jet::variable(0.0, 2))[2].real(); }},
                    v_);
}

double Distribution::spread_integral() const {
  if (const auto* e = std::get_if<Exponential>(&v_)) return 0.5 / e->rate;
  if (const auto* d = std::get_if<MixedErlang>(&v_)) {
    const auto c = erlang_survival_coeffs(*d);
    double sq = 0.0;
    for (std::size_t l = 0; l < c.size(); ++l)
      for (std::size_t k = 0; k < c.size(); ++k) {
        const int n = static_cast<int>(l + k);
        sq += c[l] * c[k] * factorial(n) / std::pow(2.0 * d->rate, n + 1);
      }
    return mean() - sq;
  }
  if (std::holds_alternative<Deterministic>(v_)) return 0.0;
  throw Error(ErrorCode::InvalidSpec, "spread integral unavailable for rational family");
}

bool Distribution::has_cdf() const { return !std::holds_alternative<Rational>(v_); }

double Distribution::cdf(double x) const {
  if (x < 0) return 0.0;
  return std::visit(Overloaded{[&](const Exponential& d) { return -std::expm1(-d.rate * x); },
                               [&](const MixedErlang& d) {
                                 const auto c = erlang_survival_coeffs(d);
                                 double surv = 0.0;
                                 double p = 1.0;
                                 for (double cl : c) {
                                   surv += cl * p;
                                   p *= x;
                                 }
                                 return 1.0 - std::exp(-d.rate * x) * surv;
                               },
                               [&](const Deterministic& d) { return x >= d.value ? 1.0 : 0.0; },
                               [&](const Rational&) -> double {
                                 throw Error(ErrorCode::UnsupportedSampling, "no CDF for rational family");
                               }},
                    v_);
}

bool Distribution::samplable() const { return has_cdf(); }

double Distribution::sample(Rng& rng) const {
  return std::visit(Overloaded{[&](const Exponential& d) { return rng.exponential(d.rate); },
                               [&](const MixedErlang& d) {
                                 const double u = rng.uniform();
                                 double acc = 0.0;
                                 std::size_t phases = d.weights.size();
                                 for (std::size_t k = 0; k < d.weights.size(); ++k) {
                                   acc += d.weights[k];
                                   if (u < acc) {
                                     phases = k + 1;
                                     break;
                                   }
                                 }
                                 double x = 0.0;
                                 for (std::size_t k = 0; k < phases; ++k) x += rng.exponential(d.rate);
                                 return x;
                               },
                               [&](const Deterministic& d) { return d.value; },
                               [&](const Rational&) -> double {
                                 throw Error(ErrorCode::UnsupportedSampling, "rational LST has no sampler");
                               }},
                    v_);
}

std::optional<RationalLST> Distribution::as_rational() const {
  if (const auto* e = std::get_if<Exponential>(&v_)) return RationalLST(Polynomial{e->rate}, Polynomial{e->rate, 1.0});
  if (const auto* d = std::get_if<MixedErlang>(&v_)) {
    const int m_max = static_cast<int>(d->weights.size());
    const Polynomial shifted{d->rate, 1.0};
    Polynomial num(std::vector<Complex>{0.0});
    for (int m = 1; m <= m_max; ++m) {
      const double w = d->weights[static_cast<std::size_t>(m - 1)];
      num = num + Complex(w * std::pow(d->rate, m)) * shifted.power(m_max - m);
    }
    return RationalLST(num, shifted.power(m_max));
  }
  if (const auto* r = std::get_if<Rational>(&v_)) return r->lst;
  return std::nullopt;
}

}  // namespace arq
