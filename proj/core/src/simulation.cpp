#include "arq/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace arq {

namespace {

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/// Runs fn(rep) for every replication on a small thread pool; results keep replication order.
std::vector<std::vector<double>> run_replications(const SimConfig& cfg,
                                                  const std::function<std::vector<double>(int)>& fn) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg.replications));
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.replications);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto worker = [&](int w) {
    try {
      for (int rep = next++; rep < cfg.replications; rep = next++) out[static_cast<std::size_t>(rep)] = fn(rep);
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      next = cfg.replications;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker, w);
  worker(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& reps, std::size_t k) {
  std::vector<double> c;
  c.reserve(reps.size());
  for (const auto& r : reps) c.push_back(r[k]);
  return c;
}

/// Row-wise cumulative sums for inverse-transform sampling of the next state.
class Transitions {
 public:
  explicit Transitions(const RMatrix& p) : cum_(p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 1; j < p.cols(); ++j) cum_(i, j) += cum_(i, j - 1);
  }
  Eigen::Index next(Eigen::Index i, Rng& rng) const {
    const double u = rng.uniform() * cum_(i, cum_.cols() - 1);
    for (Eigen::Index j = 0; j + 1 < cum_.cols(); ++j)
      if (u < cum_(i, j)) return j;
    return cum_.cols() - 1;
  }

 private:
  RMatrix cum_;
};

Eigen::Index sample_vector(const RVector& p, Rng& rng) {
  double u = rng.uniform() * p.sum();
  for (Eigen::Index j = 0; j + 1 < p.size(); ++j) {
    if (u < p(j)) return j;
    u -= p(j);
  }
  return p.size() - 1;
}

double sample_arrival(const ArrivalSpec& arrivals, Eigen::Index j, Rng& rng) {
  if (const auto* e = std::get_if<ExponentialArrivals>(&arrivals)) return rng.exponential(e->rates[static_cast<std::size_t>(j)]);
  if (const auto* m = std::get_if<MixedErlangArrivals>(&arrivals)) {
    double u = rng.uniform();
    std::size_t phases = m->weights.size();
    for (std::size_t k = 0; k < m->weights.size(); ++k) {
      if (u < m->weights[k]) {
        phases = k + 1;
        break;
      }
      u -= m->weights[k];
    }
    double t = 0.0;
    for (std::size_t k = 0; k < phases; ++k) t += rng.exponential(m->rates[static_cast<std::size_t>(j)]);
    return t;
  }
  return std::get<DeterministicArrivals>(arrivals).t;
}

void require_samplable(const Distribution& d, const char* what) {
  if (!d.samplable()) throw Error(ErrorCode::UnsupportedSampling, std::string(what) + " has no sampler");
}

/// One recursion step: returns the next state and workload.
using Step = std::function<std::pair<Eigen::Index, double>(Eigen::Index, double, Rng&)>;

Step stationary_step(const ModelSpec& spec) {
  const Transitions tr(spec.chain.transition());
  const auto services = spec.services;
  const auto arrivals = spec.arrivals;
  const double a = spec.a;
  for (const auto& s : services) require_samplable(s, "service distribution");

  if (const auto* sn = std::get_if<ShotNoiseKind>(&spec.kind)) {
    const double kappa = std::exp(-sn->r * std::get<DeterministicArrivals>(arrivals).t);
    const ShotNoiseKind k = *sn;
    for (const auto& j : k.jumps) require_samplable(j, "shot-noise jump distribution");
    return [tr, services, k, kappa](Eigen::Index i, double w, Rng& rng) {
      const double s = services[static_cast<std::size_t>(i)].sample(rng);
      const Eigen::Index j = tr.next(i, rng);
      const double c = rng.uniform() < k.p ? k.jumps[static_cast<std::size_t>(j)].sample(rng)
                                           : -rng.exponential(k.negative_rates[static_cast<std::size_t>(j)]);
      return std::make_pair(j, std::max(0.0, kappa * (w + s) + c));
    };
  }
  if (const auto* wd = std::get_if<WaitDependentKind>(&spec.kind)) {
    const double c = wd->c;
    return [tr, services, arrivals, c](Eigen::Index i, double w, Rng& rng) {
      const double s = services[static_cast<std::size_t>(i)].sample(rng);
      const Eigen::Index j = tr.next(i, rng);
      const double x = sample_arrival(arrivals, j, rng);
      return std::make_pair(j, std::max(0.0, w + std::max(0.0, s - c * w) - x));
    };
  }
  if (const auto* f = std::get_if<FgmDependence>(&spec.dependence)) {
    const double theta = f->theta;
    const auto& rates = std::get<ExponentialArrivals>(arrivals).rates;
    return [tr, services, rates, theta, a](Eigen::Index i, double w, Rng& rng) {
      const Eigen::Index j = tr.next(i, rng);
      const auto [s, x] = sample_fgm_pair(services[static_cast<std::size_t>(i)], theta, rates[static_cast<std::size_t>(j)], rng);
      return std::make_pair(j, std::max(0.0, a * w + s - x));
    };
  }
  if (const auto* b = std::get_if<BmeDependence>(&spec.dependence)) {
    std::vector<std::vector<BmeSampler>> samplers;
    for (const auto& row : b->pairs) {
      samplers.emplace_back();
      for (const auto& pair : row) {
        if (!pair.sampler) throw Error(ErrorCode::UnsupportedSampling, "two-sided joint transform has no sampler");
        require_samplable(pair.sampler->service, "pair service");
        require_samplable(pair.sampler->interarrival, "pair interarrival");
        if (pair.sampler->common) require_samplable(*pair.sampler->common, "pair common term");
        samplers.back().push_back(*pair.sampler);
      }
    }
    return [tr, samplers, a](Eigen::Index i, double w, Rng& rng) {
      const Eigen::Index j = tr.next(i, rng);
      const BmeSampler& sm = samplers[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double c = sm.common ? sm.common->sample(rng) : 0.0;
      const double s = sm.service.sample(rng) + c;
      const double x = sm.interarrival.sample(rng) + c;
      return std::make_pair(j, std::max(0.0, a * w + s - x));
    };
  }
  if (std::holds_alternative<ServiceLinkedDependence>(spec.dependence))
    throw Error(ErrorCode::UnsupportedSampling, "service-linked dependence is simulated by the transient oracle");
  return [tr, services, arrivals, a](Eigen::Index i, double w, Rng& rng) {
    const double s = services[static_cast<std::size_t>(i)].sample(rng);
    const Eigen::Index j = tr.next(i, rng);
    const double x = sample_arrival(arrivals, j, rng);
    return std::make_pair(j, std::max(0.0, a * w + s - x));
  };
}

/// Draws (S_n, A_{n+1}, Y_{n+1}) given Y_n for a transient path.
using PathStep = std::function<std::tuple<double, double, Eigen::Index>(Eigen::Index, Rng&)>;

TransientSimResult run_transient(const PathStep& step, const RVector& initial, double w, double a, int horizon,
                                 double s, double eta, const SimConfig& cfg) {
  check(cfg);
  if (horizon < 1) throw Error(ErrorCode::InvalidSpec, "transient horizon must be at least 1");
  const Eigen::Index n = initial.size();
  TransientSimResult out;
  out.replications = cfg.replications;
  out.n_states = n;
  out.horizon = horizon;
  out.values = run_replications(cfg, [&](int rep) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep));
    std::vector<Kahan> acc(static_cast<std::size_t>(horizon * n));
    for (std::int64_t path = 0; path < cfg.steps; ++path) {
      Eigen::Index y = sample_vector(initial, rng);
      double work = w;
      double t = 0.0;
      for (int k = 1;; ++k) {
        acc[static_cast<std::size_t>((k - 1) * n + y)].add(std::exp(-s * work - eta * t));
        if (k == horizon) break;
        const auto [srv, gap, next] = step(y, rng);
        work = std::max(0.0, a * work + srv - gap);
        t += gap;
        y = next;
      }
    }
    std::vector<double> v;
    for (const auto& k : acc) v.push_back(k.sum / static_cast<double>(cfg.steps));
    return v;
  });
  return out;
}

}  // namespace

void check(const SimConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::InvalidSpec, "replications must be at least 1");
  if (cfg.steps < 1 || cfg.burn_in < 0 || cfg.burn_in >= cfg.steps)
    throw Error(ErrorCode::InvalidSpec, "burn_in must be below steps");
}

SimEstimate summarize(const std::vector<double>& v) {
  SimEstimate e;
  e.replications = static_cast<int>(v.size());
  if (v.empty()) return e;
  Kahan sum;
  for (double x : v) sum.add(x);
  e.estimate = sum.sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    Kahan ss;
    for (double x : v) ss.add((x - e.estimate) * (x - e.estimate));
    e.se = std::sqrt(ss.sum / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return e;
}

std::pair<double, double> sample_fgm_pair(const Distribution& service, double theta, double lambda_j, Rng& rng) {
  if (!service.has_cdf()) throw Error(ErrorCode::UnsupportedSampling, "FGM sampling needs the service CDF");
  const double s = service.sample(rng);
  const double u1 = service.cdf(s);
  const double u = rng.uniform();
  // Conditional copula u2 + t u2 (1 - u2) = u, t = theta (1 - 2 u1); the root in [0,1]
  // written in the cancellation-free form.
  const double t = theta * (1.0 - 2.0 * u1);
  double u2 = u;
  if (std::abs(t) > 1e-12) {
    const double b = 1.0 + t;
    u2 = 2.0 * u / (b + std::sqrt(std::max(0.0, b * b - 4.0 * t * u)));
  }
  u2 = std::clamp(u2, 0.0, std::nextafter(1.0, 0.0));
  return {s, -std::log1p(-u2) / lambda_j};
}

StationarySimResult simulate_stationary(const ModelSpec& spec, const std::vector<double>& points, const SimConfig& cfg) {
  require_valid(spec);
  check(cfg);
  const Step step = stationary_step(spec);
  const Eigen::Index n = spec.n_states();
  const std::size_t np = points.size();
  // Layout per replication: mean[n], transform[np * n], idle[n], occupancy[n].
  const std::size_t width = static_cast<std::size_t>(n) * (3 + np);
  auto reps = run_replications(cfg, [&](int rep) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(rep));
    std::vector<Kahan> acc(width);
    Eigen::Index y = 0;
    double w = 0.0;
    for (std::int64_t k = 0; k < cfg.steps; ++k) {
      std::tie(y, w) = step(y, w, rng);
      if (k < cfg.burn_in) continue;
      const auto uy = static_cast<std::size_t>(y);
      const auto un = static_cast<std::size_t>(n);
      acc[uy].add(w);
      for (std::size_t p = 0; p < np; ++p) acc[un + p * un + uy].add(std::exp(-points[p] * w));
      if (w == 0.0) acc[un * (1 + np) + uy].add(1.0);
      acc[un * (2 + np) + uy].add(1.0);
    }
    const double count = static_cast<double>(cfg.steps - cfg.burn_in);
    std::vector<double> v;
    for (const auto& x : acc) v.push_back(x.sum / count);
    return v;
  });

  StationarySimResult out;
  out.points = points;
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> total(reps.size(), 0.0);
  for (std::size_t i = 0; i < un; ++i) {
    out.mean.push_back(summarize(column(reps, i)));
    for (std::size_t r = 0; r < reps.size(); ++r) total[r] += reps[r][i];
  }
  out.total_mean = summarize(total);
  for (std::size_t p = 0; p < np; ++p) {
    out.transform.emplace_back();
    std::vector<double> sum(reps.size(), 0.0);
    for (std::size_t i = 0; i < un; ++i) {
      const auto c = column(reps, un + p * un + i);
      out.transform.back().push_back(summarize(c));
      for (std::size_t r = 0; r < reps.size(); ++r) sum[r] += c[r];
    }
    out.total_transform.push_back(summarize(sum));
  }
  for (std::size_t i = 0; i < un; ++i) out.idle.push_back(summarize(column(reps, un * (1 + np) + i)));
  for (std::size_t i = 0; i < un; ++i) out.occupancy.push_back(summarize(column(reps, un * (2 + np) + i)));
  return out;
}

SimEstimate TransientSimResult::at(int n, Eigen::Index j) const {
  return summarize(column(values, static_cast<std::size_t>((n - 1) * n_states + j)));
}

std::vector<SimEstimate> TransientSimResult::weighted_sum(double r) const {
  std::vector<SimEstimate> out;
  for (Eigen::Index j = 0; j < n_states; ++j) {
    std::vector<double> per_rep;
    for (const auto& v : values) {
      Kahan acc;
      double rn = 1.0;
      for (int k = 1; k <= horizon; ++k) {
        rn *= r;
        acc.add(rn * v[static_cast<std::size_t>((k - 1) * n_states + j)]);
      }
      per_rep.push_back(acc.sum);
    }
    out.push_back(summarize(per_rep));
  }
  return out;
}

TransientSimResult simulate_transient(const ModulatedArrivalSpec& spec, const std::vector<Distribution>& services,
                                      double a, int horizon, double s, double eta, const SimConfig& cfg) {
  if (auto v = validate(spec); !v.empty()) throw Error(ErrorCode::InvalidSpec, v.front());
  for (const auto& d : services) require_samplable(d, "service distribution");
  const RMatrix q = spec.generator;
  const std::vector<double> rates = spec.rates;
  const Eigen::Index n = spec.n_states();
  PathStep step = [q, rates, services, n](Eigen::Index x, Rng& rng) {
    const double srv = services[static_cast<std::size_t>(x)].sample(rng);
    double gap = 0.0;
    for (;;) {
      const double lam = rates[static_cast<std::size_t>(x)];
      const double out_rate = -q(x, x);
      const double total = lam + out_rate;
      gap += rng.exponential(total);
      double u = rng.uniform() * total;
      if (u < lam) break;
      u -= lam;
      Eigen::Index target = x;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == x || q(x, k) <= 0.0) continue;
        target = k;
        if (u < q(x, k)) break;
        u -= q(x, k);
      }
      x = target;
    }
    return std::make_tuple(srv, gap, x);
  };
  return run_transient(step, spec.initial, spec.w, a, horizon, s, eta, cfg);
}

TransientSimResult simulate_transient_service_linked(const ServiceLinkedDependence& dependence, const RVector& initial,
                                                     double w, const std::vector<Distribution>& services, double a,
                                                     int horizon, double s, double eta, const SimConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(services.size());
  for (const auto& d : services) require_samplable(d, "service distribution");
  RMatrix p(n, n);
  RMatrix base_rate = RMatrix::Zero(n, n);  // 0 encodes a point mass at 0
  std::vector<double> kappa(static_cast<std::size_t>(n), 0.0);
  std::vector<double> delay(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const RationalLST& c = dependence.chi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      p(i, j) = c.is_zero() ? 0.0 : c(Complex{}).real();
      if (c.is_zero()) continue;
      const auto& num = c.numerator();
      const auto& den = c.denominator();
      if (num.degree() == 0 && den.degree() == 1) {
        base_rate(i, j) = (den.coeffs()[0] / den.coeffs()[1]).real();
        if (!(base_rate(i, j) > 0.0)) throw Error(ErrorCode::UnsupportedSampling, "chi pole must be negative");
      } else if (!(num.degree() == 0 && den.degree() == 0)) {
        throw Error(ErrorCode::UnsupportedSampling, "chi must be a scaled exponential transform");
      }
    }
    const RationalLST& psi = dependence.psi[static_cast<std::size_t>(i)];
    if (psi.is_zero()) continue;
    const auto& num = psi.numerator().coeffs();
    const auto& den = psi.denominator().coeffs();
    if (psi.numerator().degree() != 1 || std::abs(num[0]) > 1e-14 || psi.denominator().degree() != 1)
      throw Error(ErrorCode::UnsupportedSampling, "psi must have the form k s / (s + d)");
    kappa[static_cast<std::size_t>(i)] = (num[1] / den[1]).real();
    delay[static_cast<std::size_t>(i)] = (den[0] / den[1]).real();
    if (!(kappa[static_cast<std::size_t>(i)] >= 0.0 && delay[static_cast<std::size_t>(i)] > 0.0))
      throw Error(ErrorCode::UnsupportedSampling, "psi needs k >= 0 and d > 0");
  }
  const Transitions tr(p);
  PathStep step = [tr, base_rate, kappa, delay, services](Eigen::Index i, Rng& rng) {
    const double srv = services[static_cast<std::size_t>(i)].sample(rng);
    const Eigen::Index j = tr.next(i, rng);
    double gap = base_rate(i, j) > 0.0 ? rng.exponential(base_rate(i, j)) : 0.0;
    const auto ui = static_cast<std::size_t>(i);
    if (kappa[ui] > 0.0) {
      const std::uint64_t hits = rng.poisson(kappa[ui] * srv);
      for (std::uint64_t h = 0; h < hits; ++h) gap += rng.exponential(delay[ui]);
    }
    return std::make_tuple(srv, gap, j);
  };
  return run_transient(step, initial, w, a, horizon, s, eta, cfg);
}

}  // namespace arq
