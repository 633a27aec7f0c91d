#include "config.hpp"

#include <fstream>

#include "csv.hpp"

namespace arq::app {

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t k) { return path + "/" + std::to_string(k); }

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(path, key), "missing required field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& path) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, child(path, key));
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::vector<double> numbers(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t k = 0; k < array(j, path).size(); ++k) out.push_back(number(j[k], child(path, k)));
  return out;
}

RVector real_vector(const Json& j, const std::string& path) {
  const auto v = numbers(j, path);
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

RMatrix real_matrix(const Json& j, const std::string& path) {
  const auto n = array(j, path).size();
  if (n == 0) throw ConfigError(path, "matrix must not be empty");
  RMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(array(j[0], child(path, 0)).size()));
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = numbers(j[r], child(path, r));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw ConfigError(child(path, r), "ragged matrix row");
    for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

std::vector<Distribution> distributions(const Json& j, const std::string& path) {
  std::vector<Distribution> out;
  for (std::size_t k = 0; k < array(j, path).size(); ++k) out.push_back(parse_distribution(j[k], child(path, k)));
  return out;
}

Polynomial polynomial(const Json& j, const std::string& path) {
  std::vector<Complex> c;
  for (std::size_t k = 0; k < array(j, path).size(); ++k) c.push_back(parse_complex(j[k], child(path, k)));
  return Polynomial(std::move(c));
}

ArrivalSpec parse_arrivals(const Json& j, const std::string& path) {
  const std::string type = text(require(j, "type", path), child(path, "type"));
  if (type == "exponential") return ExponentialArrivals{numbers(require(j, "rates", path), child(path, "rates"))};
  if (type == "mixed_erlang")
    return MixedErlangArrivals{numbers(require(j, "rates", path), child(path, "rates")),
                               numbers(require(j, "weights", path), child(path, "weights"))};
  if (type == "deterministic") return DeterministicArrivals{number(require(j, "t", path), child(path, "t"))};
  throw ConfigError(child(path, "type"), "unknown arrival type '" + type + "'");
}

ServiceLinkedDependence parse_linked(const Json& j, const std::string& path) {
  ServiceLinkedDependence d;
  const Json& chi = array(require(j, "chi", path), child(path, "chi"));
  for (std::size_t r = 0; r < chi.size(); ++r) {
    d.chi.emplace_back();
    const std::string rp = child(child(path, "chi"), r);
    for (std::size_t c = 0; c < array(chi[r], rp).size(); ++c) d.chi.back().push_back(parse_rational(chi[r][c], child(rp, c)));
  }
  const Json& psi = array(require(j, "psi", path), child(path, "psi"));
  for (std::size_t k = 0; k < psi.size(); ++k) d.psi.push_back(parse_rational(psi[k], child(child(path, "psi"), k)));
  return d;
}

DependenceSpec parse_dependence(const Json& j, const std::string& path) {
  const std::string type = text(require(j, "type", path), child(path, "type"));
  if (type == "independent") return IndependentDependence{};
  if (type == "fgm") return FgmDependence{number(require(j, "theta", path), child(path, "theta"))};
  if (type == "bme") {
    BmeDependence b;
    const std::string pp = child(path, "pairs");
    const Json& pairs = array(require(j, "pairs", path), pp);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
      b.pairs.emplace_back();
      for (std::size_t c = 0; c < array(pairs[r], child(pp, r)).size(); ++c) {
        const Json& e = pairs[r][c];
        const std::string ep = child(child(pp, r), c);
        BmePair pair{parse_rational(e, ep), std::nullopt};
        if (auto it = e.find("sampler"); it != e.end()) {
          const std::string sp = child(ep, "sampler");
          BmeSampler s{parse_distribution(require(*it, "service", sp), child(sp, "service")),
                       parse_distribution(require(*it, "interarrival", sp), child(sp, "interarrival")), std::nullopt};
          if (auto ct = it->find("common"); ct != it->end()) s.common = parse_distribution(*ct, child(sp, "common"));
          pair.sampler = std::move(s);
        }
        b.pairs.back().push_back(std::move(pair));
      }
    }
    return b;
  }
  if (type == "service_linked") return parse_linked(j, path);
  throw ConfigError(child(path, "type"), "unknown dependence type '" + type + "'");
}

ModelKind parse_kind(const Json& j, const std::string& path) {
  const std::string type = j.is_string() ? j.get<std::string>() : text(require(j, "type", path), child(path, "type"));
  if (type == "autoregressive") return AutoregressiveKind{};
  if (type == "shot_noise") {
    ShotNoiseKind k;
    k.r = number(require(j, "r", path), child(path, "r"));
    k.p = number(require(j, "p", path), child(path, "p"));
    k.jumps = distributions(require(j, "jumps", path), child(path, "jumps"));
    k.negative_rates = numbers(require(j, "negative_rates", path), child(path, "negative_rates"));
    return k;
  }
  if (type == "wait_dependent")
    return WaitDependentKind{number(require(j, "c", path), child(path, "c")), number(require(j, "mu", path), child(path, "mu"))};
  throw ConfigError(child(path, "type"), "unknown model kind '" + type + "'");
}

std::string first_violation(const std::vector<std::string>& v) { return v.empty() ? std::string() : v.front(); }

}  // namespace

Json load_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot open '" + file + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON in '") + file + "': " + e.what());
  }
}

Complex parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], child(path, 0)), number(j[1], child(path, 1))};
  throw ConfigError(path, "expected a number or a [re, im] pair");
}

RationalLST parse_rational(const Json& j, const std::string& path) {
  return RationalLST(polynomial(require(j, "numerator", path), child(path, "numerator")),
                     polynomial(require(j, "denominator", path), child(path, "denominator")));
}

Distribution parse_distribution(const Json& j, const std::string& path) {
  const std::string type = text(require(j, "type", path), child(path, "type"));
  if (type == "exponential") return Distribution::exponential(number(require(j, "rate", path), child(path, "rate")));
  if (type == "mixed_erlang")
    return Distribution::mixed_erlang(number(require(j, "rate", path), child(path, "rate")),
                                      numbers(require(j, "weights", path), child(path, "weights")));
  if (type == "deterministic") return Distribution::deterministic(number(require(j, "value", path), child(path, "value")));
  if (type == "rational") return Distribution::rational(parse_rational(j, path));
  throw ConfigError(child(path, "type"), "unknown distribution type '" + type + "'");
}

ModelSpec parse_model(const Json& j, const std::string& path) {
  ModelSpec m;
  m.chain = MarkovChain(real_matrix(require(j, "chain", path), child(path, "chain")));
  m.arrivals = parse_arrivals(require(j, "arrivals", path), child(path, "arrivals"));
  m.services = distributions(require(j, "services", path), child(path, "services"));
  if (auto it = j.find("dependence"); it != j.end()) m.dependence = parse_dependence(*it, child(path, "dependence"));
  if (auto it = j.find("model_kind"); it != j.end()) m.kind = parse_kind(*it, child(path, "model_kind"));
  if (std::holds_alternative<AutoregressiveKind>(m.kind))
    m.a = number(require(j, "a", path), child(path, "a"));
  else
    m.a = number_or(j, "a", m.a, path);
  return m;
}

SimConfig parse_sim_config(const Json& j, const std::string& path) {
  SimConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto integer = [&](const char* key, auto fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(child(path, key), "expected an integer");
    return it->get<decltype(fallback)>();
  };
  c.seed = integer("seed", c.seed);
  c.steps = integer("steps", c.steps);
  c.burn_in = integer("burn_in", c.burn_in);
  c.replications = integer("replications", c.replications);
  c.threads = integer("threads", c.threads);
  try {
    check(c);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

TransientConfig parse_transient(const Json& j, const std::string& path) {
  TransientConfig c;
  c.services = distributions(require(j, "services", path), child(path, "services"));
  c.a = number(require(j, "a", path), child(path, "a"));
  c.w = number_or(j, "w", 0.0, path);
  c.initial = real_vector(require(j, "initial", path), child(path, "initial"));
  if (auto it = j.find("dependence"); it != j.end()) {
    const std::string dp = child(path, "dependence");
    if (text(require(*it, "type", dp), child(dp, "type")) != "service_linked")
      throw ConfigError(child(dp, "type"), "transient dependence must be service_linked");
    c.service_linked = true;
    c.linked = parse_linked(*it, dp);
  } else {
    c.modulated.generator = real_matrix(require(j, "generator", path), child(path, "generator"));
    c.modulated.rates = numbers(require(j, "rates", path), child(path, "rates"));
    c.modulated.initial = c.initial;
    c.modulated.w = c.w;
  }
  const std::string qp = child(path, "queries");
  const Json& qs = array(require(j, "queries", path), qp);
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const std::string p = child(qp, k);
    if (qs[k].is_array()) {
      if (qs[k].size() != 3) throw ConfigError(p, "expected an (r, s, eta) triple");
      c.queries.push_back({parse_complex(qs[k][0], child(p, 0)), parse_complex(qs[k][1], child(p, 1)),
                           parse_complex(qs[k][2], child(p, 2))});
    } else {
      c.queries.push_back({parse_complex(require(qs[k], "r", p), child(p, "r")),
                           parse_complex(require(qs[k], "s", p), child(p, "s")),
                           parse_complex(require(qs[k], "eta", p), child(p, "eta"))});
    }
  }
  return c;
}

void require_valid_config(const ModelSpec& spec, const std::string& path) {
  const auto v = validate(spec);
  if (!v.empty()) throw ConfigError(path, "invalid model: " + first_violation(v));
}

void require_valid_config(const TransientConfig& cfg, const std::string& path) {
  if (!(cfg.a > 0.0 && cfg.a < 1.0)) throw ConfigError(child(path, "a"), "invalid model: a must lie in (0,1)");
  if (static_cast<Eigen::Index>(cfg.services.size()) != cfg.initial.size())
    throw ConfigError(child(path, "services"), "services need one distribution per state");
  for (std::size_t k = 0; k < cfg.services.size(); ++k)
    if (auto v = cfg.services[k].check(); !v.empty()) throw ConfigError(child(child(path, "services"), k), v.front());
  if ((cfg.initial.array() < 0.0).any() || std::abs(cfg.initial.sum() - 1.0) > 1e-10)
    throw ConfigError(child(path, "initial"), "initial distribution must be a probability vector");
  if (!cfg.service_linked) {
    if (auto v = validate(cfg.modulated); !v.empty()) throw ConfigError(path, "invalid model: " + v.front());
  } else {
    ModelSpec probe;
    RMatrix p(cfg.initial.size(), cfg.initial.size());
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index k = 0; k < p.cols(); ++k) {
        if (static_cast<Eigen::Index>(cfg.linked.chi.size()) != p.rows() ||
            static_cast<Eigen::Index>(cfg.linked.chi[static_cast<std::size_t>(i)].size()) != p.cols())
          throw ConfigError(child(child(path, "dependence"), "chi"), "chi must be N x N");
        p(i, k) = cfg.linked.chi[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)](Complex{}).real();
      }
    if (static_cast<Eigen::Index>(cfg.linked.psi.size()) != p.rows())
      throw ConfigError(child(child(path, "dependence"), "psi"), "psi needs one entry per state");
    for (std::size_t i = 0; i < cfg.linked.psi.size(); ++i)
      if (std::abs(cfg.linked.psi[i](Complex{})) > 1e-12)
        throw ConfigError(child(child(path, "dependence"), "psi"), "psi must vanish at s=0");
    if (auto v = MarkovChain(p).check(); !v.empty()) throw ConfigError(child(path, "dependence"), "chi(0): " + v.front());
  }
  for (std::size_t k = 0; k < cfg.queries.size(); ++k) {
    const auto& q = cfg.queries[k];
    if (!(std::abs(q.r) < 1.0)) throw ConfigError(child(child(path, "queries"), k), "|r| must be below 1");
    if (q.eta.real() < 0.0) throw ConfigError(child(child(path, "queries"), k), "Re eta must be nonnegative");
  }
}

TransientResult run_transient_query(const TransientConfig& cfg, const TransientQuery& q, const TruncationPolicy& policy) {
  if (cfg.service_linked)
    return solve_transient_service_linked(cfg.linked, cfg.initial, cfg.w, cfg.services, cfg.a, q, policy);
  return solve_transient(cfg.modulated, cfg.services, cfg.a, q, policy);
}

OrderedJson complex_json(Complex z) { return OrderedJson::array({z.real(), z.imag()}); }

OrderedJson vector_json(const CVector& v) {
  OrderedJson out = OrderedJson::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

OrderedJson vector_json(const RVector& v) {
  OrderedJson out = OrderedJson::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

OrderedJson estimate_json(const SimEstimate& e) {
  return OrderedJson{{"estimate", e.estimate}, {"se", e.se}, {"n_replications", e.replications}};
}

OrderedJson solution_json(const StationarySolution& sol, const std::vector<double>& points) {
  OrderedJson out;
  out["solver"] = to_string(sol.kind());
  out["pi"] = vector_json(sol.pi());
  const BoundaryVector& b = sol.boundary();
  OrderedJson bj{{"kind", to_string(b.kind)},
                 {"values", vector_json(b.values)},
                 {"condition_number", b.condition_number},
                 {"residual", b.residual}};
  if (b.constant_terms.size() > 0) bj["constant_terms"] = vector_json(b.constant_terms);
  out["boundary"] = bj;
  const RVector mean = sol.closed_form_mean() ? *sol.closed_form_mean() : sol.mean();
  out["mean"] = vector_json(mean);
  out["total_mean"] = mean.sum();
  OrderedJson table = OrderedJson::array();
  for (double s : points) {
    const TransformResult z = sol.evaluate(s);
    table.push_back({{"s", s},
                     {"Z", vector_json(z.value)},
                     {"sum_terms", z.terms_used.sum_terms},
                     {"product_terms", z.terms_used.product_terms},
                     {"residual", z.residual}});
  }
  out["transform"] = table;
  OrderedJson diags = OrderedJson::array();
  for (const auto& d : sol.diagnostics())
    diags.push_back({{"label", d.label},
                     {"sum_terms", d.counts.sum_terms},
                     {"product_terms", d.counts.product_terms},
                     {"residual", d.residual}});
  out["diagnostics"] = diags;
  out["warnings"] = sol.warnings();
  out["tolerance"] = sol.policy().tolerance;
  return out;
}

std::string transform_table_csv(const StationarySolution& sol, const std::vector<double>& points) {
  CsvTable t;
  t.header.emplace_back("s");
  for (Eigen::Index j = 1; j <= sol.n_states(); ++j) {
    t.header.push_back("Z" + std::to_string(j) + "_re");
    t.header.push_back("Z" + std::to_string(j) + "_im");
  }
  for (double s : points) {
    const CVector z = sol.evaluate(s).value;
    std::vector<CsvCell> row{s};
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      row.emplace_back(z(j).real());
      row.emplace_back(z(j).imag());
    }
    t.rows.push_back(std::move(row));
  }
  return write_csv(t);
}

std::string transient_csv(const std::vector<TransientQuery>& queries, const std::vector<TransientResult>& results) {
  CsvTable t;
  t.header = {"r", "s_re", "s_im", "eta_re", "eta_im", "state", "Z_re", "Z_im", "terms_used"};
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const auto& q = queries[k];
    const auto& r = results[k];
    for (Eigen::Index j = 0; j < r.value.size(); ++j)
      t.rows.push_back({q.r.real(), q.s.real(), q.s.imag(), q.eta.real(), q.eta.imag(), static_cast<double>(j + 1),
                        r.value(j).real(), r.value(j).imag(), static_cast<double>(r.terms_used.sum_terms)});
  }
  return write_csv(t);
}

}  // namespace arq::app
