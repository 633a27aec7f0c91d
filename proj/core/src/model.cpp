#include "arq/model.hpp"

#include <cmath>

namespace arq {

namespace {

void check_rates(const std::vector<double>& rates, Eigen::Index n, const char* what, std::vector<std::string>& out) {
  if (static_cast<Eigen::Index>(rates.size()) != n) {
    out.push_back(std::string(what) + " needs one rate per state");
    return;
  }
  for (double r : rates)
    if (!(r > 0) || !std::isfinite(r)) out.push_back(std::string(what) + " rates must be positive");
}

}  // namespace

std::vector<std::string> validate(const ModelSpec& spec) {
  std::vector<std::string> out = spec.chain.check();
  if (!out.empty()) return out;
  if (!spec.chain.irreducible()) out.emplace_back("background chain must be irreducible");
  const Eigen::Index n = spec.n_states();

  const bool autoregressive = std::holds_alternative<AutoregressiveKind>(spec.kind);
  if (autoregressive && !(spec.a > 0.0 && spec.a < 1.0)) out.emplace_back("a must lie in (0,1)");

  if (const auto* e = std::get_if<ExponentialArrivals>(&spec.arrivals)) {
    check_rates(e->rates, n, "arrival", out);
  } else if (const auto* m = std::get_if<MixedErlangArrivals>(&spec.arrivals)) {
    check_rates(m->rates, n, "arrival", out);
    double sum = 0.0;
    for (double w : m->weights) {
      if (!(w >= 0)) out.emplace_back("Erlang mixture weights must be nonnegative");
      sum += w;
    }
    if (m->weights.empty() || std::abs(sum - 1.0) > 1e-12) out.emplace_back("Erlang mixture weights must sum to 1");
  } else if (const auto* d = std::get_if<DeterministicArrivals>(&spec.arrivals)) {
    if (!(d->t > 0)) out.emplace_back("deterministic interarrival must be positive");
    if (!std::holds_alternative<ShotNoiseKind>(spec.kind))
      out.emplace_back("deterministic arrivals are only used by the shot-noise model");
  }

  if (static_cast<Eigen::Index>(spec.services.size()) != n) {
    out.emplace_back("services need one distribution per state");
  } else {
    for (const auto& s : spec.services)
      for (auto& msg : s.check()) out.push_back("service: " + msg);
  }

  if (const auto* f = std::get_if<FgmDependence>(&spec.dependence)) {
    if (!(f->theta >= -1.0 && f->theta <= 1.0)) out.emplace_back("FGM parameter out of [-1,1]");
    if (!std::holds_alternative<ExponentialArrivals>(spec.arrivals))
      out.emplace_back("FGM dependence requires exponential arrivals");
    for (const auto& s : spec.services)
      if (!s.has_density()) out.emplace_back("FGM dependence requires services with a density");
  } else if (const auto* b = std::get_if<BmeDependence>(&spec.dependence)) {
    if (static_cast<Eigen::Index>(b->pairs.size()) != n) {
      out.emplace_back("BME dependence needs an N x N table of pair transforms");
    } else {
      for (const auto& row : b->pairs) {
        if (static_cast<Eigen::Index>(row.size()) != n) {
          out.emplace_back("BME dependence needs an N x N table of pair transforms");
          break;
        }
        for (const auto& pair : row) {
          if (!pair.joint.unit_at_zero(1e-10)) out.emplace_back("BME pair transform must equal 1 at s=0");
          if (pair.joint.numerator().degree() >= pair.joint.denominator().degree())
            out.emplace_back("BME pair numerator degree must be below denominator degree");
        }
      }
    }
  } else if (const auto* l = std::get_if<ServiceLinkedDependence>(&spec.dependence)) {
    if (static_cast<Eigen::Index>(l->chi.size()) != n || static_cast<Eigen::Index>(l->psi.size()) != n) {
      out.emplace_back("service-linked dependence needs N x N chi and N psi entries");
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        Complex total{};
        for (const auto& c : l->chi[static_cast<std::size_t>(i)]) total += c(Complex{});
        if (std::abs(total - 1.0) > 1e-10) out.emplace_back("chi row " + std::to_string(i) + " must sum to 1 at s=0");
        if (std::abs(l->psi[static_cast<std::size_t>(i)](Complex{})) > 1e-12) out.emplace_back("psi must vanish at s=0");
      }
    }
  }

  if (const auto* sn = std::get_if<ShotNoiseKind>(&spec.kind)) {
    if (!(sn->r > 0)) out.emplace_back("shot-noise decay r must be positive");
    if (!(sn->p >= 0.0 && sn->p <= 1.0)) out.emplace_back("shot-noise jump probability must lie in [0,1]");
    if (!std::holds_alternative<DeterministicArrivals>(spec.arrivals))
      out.emplace_back("shot-noise model requires deterministic arrivals");
    if (static_cast<Eigen::Index>(sn->jumps.size()) != n) out.emplace_back("shot-noise needs one jump distribution per state");
    for (const auto& j : sn->jumps)
      for (auto& msg : j.check()) out.push_back("jump: " + msg);
    check_rates(sn->negative_rates, n, "negative jump", out);
  } else if (const auto* w = std::get_if<WaitDependentKind>(&spec.kind)) {
    if (!(w->c > 0)) out.emplace_back("wait-dependent discount c must be positive");
    if (!(w->mu > 0)) out.emplace_back("wait-dependent service rate mu must be positive");
    if (!std::holds_alternative<ExponentialArrivals>(spec.arrivals))
      out.emplace_back("wait-dependent model requires exponential arrivals");
    for (const auto& s : spec.services) {
      const auto* e = std::get_if<Distribution::Exponential>(&s.variant());
      if (e == nullptr || std::abs(e->rate - w->mu) > 1e-12) {
        out.emplace_back("wait-dependent model requires exponential services with rate mu");
        break;
      }
    }
  }
  return out;
}

void require_valid(const ModelSpec& spec) {
  if (auto v = spec.chain.check(); !v.empty()) throw Error(ErrorCode::NonStochastic, v.front());
  if (!spec.chain.irreducible()) throw Error(ErrorCode::NonIrreducible, "background chain is not irreducible");
  if (auto v = validate(spec); !v.empty()) throw Error(ErrorCode::InvalidSpec, v.front());
}

const std::vector<double>& arrival_rates(const ModelSpec& spec) {
  if (const auto* e = std::get_if<ExponentialArrivals>(&spec.arrivals)) return e->rates;
  if (const auto* m = std::get_if<MixedErlangArrivals>(&spec.arrivals)) return m->rates;
  throw Error(ErrorCode::InvalidSpec, "arrivals have no per-state rates");
}

}  // namespace arq
