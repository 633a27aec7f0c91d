#include "arq/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace arq {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments mixture_moments(const RVector& pi, const RVector& m1, const RVector& m2) {
  Moments m;
  m.mean = pi.dot(m1);
  m.var = pi.dot(m2) - m.mean * m.mean;
  return m;
}

}  // namespace

double autocorrelation_service(const ModelSpec& spec, int n) {
  require_valid(spec);
  if (n < 1) throw Error(ErrorCode::InvalidSpec, "lag must be at least 1");
  const Eigen::Index k = spec.n_states();
  const RVector pi = stationary_distribution(spec.chain);
  RVector g(k);
  RVector g2(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    g(i) = spec.services[static_cast<std::size_t>(i)].mean();
    g2(i) = spec.services[static_cast<std::size_t>(i)].second_moment();
  }
  const Moments s = mixture_moments(pi, g, g2);
  if (!(s.var > 0.0)) throw Error(ErrorCode::DegenerateVariance, "stationary service variance is not positive");
  const RMatrix centred = chain_power(spec.chain, n) - RVector::Ones(k) * pi.transpose();
  const double num = (pi.asDiagonal() * centred * g).dot(g);
  return std::clamp(num / s.var, -1.0, 1.0);
}

CrossCorrelation cross_correlation(const ModelSpec& spec) {
  require_valid(spec);
  const auto* exp = std::get_if<ExponentialArrivals>(&spec.arrivals);
  if (exp == nullptr) throw Error(ErrorCode::InvalidSpec, "cross-correlation needs exponential arrivals");
  double theta = 0.0;
  if (const auto* f = std::get_if<FgmDependence>(&spec.dependence))
    theta = f->theta;
  else if (!std::holds_alternative<IndependentDependence>(spec.dependence))
    throw Error(ErrorCode::InvalidSpec, "cross-correlation needs independent or FGM dependence");

  const Eigen::Index k = spec.n_states();
  const RVector pi = stationary_distribution(spec.chain);
  const RMatrix& p = spec.chain.transition();
  RVector g(k), g2(k), spread(k), ia(k), ia2(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Distribution& d = spec.services[static_cast<std::size_t>(i)];
    g(i) = d.mean();
    g2(i) = d.second_moment();
    spread(i) = d.spread_integral();
    const double l = exp->rates[static_cast<std::size_t>(i)];
    ia(i) = 1.0 / l;
    ia2(i) = 2.0 / (l * l);
  }
  const Moments s = mixture_moments(pi, g, g2);
  const Moments a = mixture_moments(pi, ia, ia2);
  if (!(s.var > 0.0) || !(a.var > 0.0))
    throw Error(ErrorCode::DegenerateVariance, "stationary service or interarrival variance is not positive");

  // FGM covariance of S and A: theta * int F_S(1-F_S) * int F_A(1-F_A), the latter 1/(2 lambda).
  double next = 0.0;
  double same = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) next += pi(i) * p(i, j) * (g(i) * ia(j) + theta * spread(i) * ia(j) / 2.0);
    same += pi(i) * (g(i) * ia(i) + theta * spread(i) * ia(i) / 2.0);
  }
  const double scale = std::sqrt(s.var * a.var);
  CrossCorrelation out;
  out.next_interarrival = std::clamp((next - s.mean * a.mean) / scale, -1.0, 1.0);
  out.same_state = std::clamp((same - s.mean * a.mean) / scale, -1.0, 1.0);
  return out;
}

}  // namespace arq
