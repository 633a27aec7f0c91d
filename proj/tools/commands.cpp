#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "arq/metrics.hpp"
#include "arq/stationary.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "sweep.hpp"

namespace arq::app {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
};

void diagnostic(const char* level, const std::string& message, const char* code = nullptr) {
  OrderedJson d{{"level", level}};
  if (code) d["code"] = code;
  d["message"] = message;
  std::cerr << d.dump() << '\n';
}

void emit(const Options& o, const std::string& body) {
  if (o.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ConfigError("", "cannot write '" + o.out + "'");
  f << body;
}

TruncationPolicy policy_for(const Options& o) {
  TruncationPolicy p = TruncationPolicy::from_environment();
  if (o.tolerance) {
    if (!(*o.tolerance > 0.0)) throw ConfigError("", "--tolerance must be positive");
    p.tolerance = *o.tolerance;
  }
  return p;
}

std::vector<double> points_or(const Json& j, const char* key, std::vector<double> fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  std::vector<double> out;
  if (!it->is_array()) throw ConfigError(std::string("/") + key, "expected an array of numbers");
  for (std::size_t k = 0; k < it->size(); ++k) {
    if (!(*it)[k].is_number()) throw ConfigError("/" + std::string(key) + "/" + std::to_string(k), "expected a number");
    out.push_back((*it)[k].get<double>());
  }
  return out;
}

ModelSpec load_model(const Json& j) {
  ModelSpec m = parse_model(j);
  require_valid_config(m);
  return m;
}

TransientConfig load_transient(const Json& j) {
  if (!j.contains("transient")) throw ConfigError("/transient", "missing required field");
  TransientConfig c = parse_transient(j["transient"], "/transient");
  require_valid_config(c, "/transient");
  return c;
}

void report_warnings(const StationarySolution& sol) {
  for (const auto& w : sol.warnings()) diagnostic("warning", w);
}

int cmd_solve(const Options& o) {
  const Json j = load_json(o.config);
  const ModelSpec m = load_model(j);
  const auto points = points_or(j, "evaluate", {0.0, 0.5, 1.0, 2.0});
  const StationarySolution sol = solve_stationary(m, policy_for(o));
  report_warnings(sol);
  emit(o, o.format == "csv" ? transform_table_csv(sol, points) : solution_json(sol, points).dump(2) + "\n");
  return kExitOk;
}

int cmd_transient(const Options& o) {
  const TransientConfig c = load_transient(load_json(o.config));
  const TruncationPolicy policy = policy_for(o);
  std::vector<TransientResult> results;
  for (const auto& q : c.queries) {
    results.push_back(run_transient_query(c, q, policy));
    for (const auto& d : results.back().diagnostics)
      if (d.counts.sum_terms >= policy.max_terms) diagnostic("warning", d.label + " hit the term cap");
  }
  if (o.format == "csv") {
    emit(o, transient_csv(c.queries, results));
    return kExitOk;
  }
  OrderedJson out = OrderedJson::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    out.push_back({{"r", complex_json(c.queries[k].r)},
                   {"s", complex_json(c.queries[k].s)},
                   {"eta", complex_json(c.queries[k].eta)},
                   {"Z", vector_json(r.value)},
                   {"terms_used", r.terms_used.sum_terms},
                   {"residual", r.residual},
                   {"condition_number", r.condition_number},
                   {"boundary_residual", r.boundary_residual},
                   {"constant_terms", vector_json(r.constant_terms)}});
  }
  emit(o, out.dump(2) + "\n");
  return kExitOk;
}

OrderedJson estimates_json(const std::vector<SimEstimate>& v) {
  OrderedJson a = OrderedJson::array();
  for (const auto& e : v) a.push_back(estimate_json(e));
  return a;
}

void add_rows(CsvTable& t, const std::string& target, std::optional<double> at, const std::vector<SimEstimate>& v) {
  for (std::size_t j = 0; j < v.size(); ++j)
    t.rows.push_back({target, at ? CsvCell{*at} : CsvCell{}, static_cast<double>(j + 1), v[j].estimate,
                      v[j].se, static_cast<double>(v[j].replications)});
}

int cmd_simulate(const Options& o) {
  const Json j = load_json(o.config);
  SimConfig cfg = parse_sim_config(j.value("simulation", Json()), "/simulation");
  if (o.seed) cfg.seed = *o.seed;
  CsvTable t;
  t.header = {"target", "at", "state", "estimate", "se", "n_replications"};
  OrderedJson out;
  out["seed"] = cfg.seed;

  if (j.contains("transient")) {
    const TransientConfig c = load_transient(j);
    const int horizon = j.value("simulation", Json::object()).value("horizon", 50);
    OrderedJson qs = OrderedJson::array();
    for (const auto& q : c.queries) {
      if (q.s.imag() != 0.0 || q.eta.imag() != 0.0 || q.r.imag() != 0.0)
        throw ConfigError("/transient/queries", "simulation needs real r, s and eta");
      const TransientSimResult sim =
          c.service_linked ? simulate_transient_service_linked(c.linked, c.initial, c.w, c.services, c.a, horizon,
                                                               q.s.real(), q.eta.real(), cfg)
                           : simulate_transient(c.modulated, c.services, c.a, horizon, q.s.real(), q.eta.real(), cfg);
      const auto est = sim.weighted_sum(q.r.real());
      qs.push_back({{"r", q.r.real()}, {"s", q.s.real()}, {"eta", q.eta.real()}, {"horizon", horizon}, {"Z", estimates_json(est)}});
      add_rows(t, "transient_r" + format_number(q.r.real()) + "_eta" + format_number(q.eta.real()), q.s.real(), est);
    }
    out["transient"] = qs;
  } else {
    const ModelSpec m = load_model(j);
    const auto points = points_or(j, "points", {0.5, 1.0, 2.0});
    const StationarySimResult sim = simulate_stationary(m, points, cfg);
    out["mean"] = estimates_json(sim.mean);
    out["total_mean"] = estimate_json(sim.total_mean);
    OrderedJson tr = OrderedJson::array();
    for (std::size_t p = 0; p < points.size(); ++p) {
      tr.push_back({{"s", points[p]}, {"Z", estimates_json(sim.transform[p])}});
      add_rows(t, "transform", points[p], sim.transform[p]);
    }
    out["transform"] = tr;
    out["idle"] = estimates_json(sim.idle);
    out["occupancy"] = estimates_json(sim.occupancy);
    add_rows(t, "mean", std::nullopt, sim.mean);
    add_rows(t, "idle", std::nullopt, sim.idle);
    add_rows(t, "occupancy", std::nullopt, sim.occupancy);
    t.rows.push_back({std::string("total_mean"), {}, {}, sim.total_mean.estimate, sim.total_mean.se,
                      static_cast<double>(sim.total_mean.replications)});
  }
  emit(o, o.format == "csv" ? write_csv(t) : out.dump(2) + "\n");
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  const Json j = load_json(o.config);
  const SweepSpec s = parse_sweep(j, std::filesystem::path(o.config).parent_path().string());
  SweepSpec run = s;
  if (o.seed) run.sim.seed = *o.seed;
  const SweepResult r = run_sweep(run, policy_for(o));
  if (o.format == "json") {
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : r.table.rows) {
      OrderedJson obj;
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (const auto* d = std::get_if<double>(&row[k])) obj[r.table.header[k]] = *d;
        else if (const auto* str = std::get_if<std::string>(&row[k])) obj[r.table.header[k]] = *str;
        else obj[r.table.header[k]] = nullptr;
      }
      rows.push_back(obj);
    }
    emit(o, rows.dump(2) + "\n");
  } else {
    emit(o, write_csv(r.table));
  }
  for (const auto& row : r.table.rows)
    if (const auto* st = std::get_if<std::string>(&row[2]); st && *st != "ok") diagnostic("error", *st);
  return r.failed_rows > 0 ? kExitSolver : kExitOk;
}

int cmd_correlations(const Options& o) {
  const Json j = load_json(o.config);
  const ModelSpec m = load_model(j);
  std::vector<int> lags{1, 2, 3};
  if (auto it = j.find("lags"); it != j.end()) {
    lags.clear();
    if (!it->is_array()) throw ConfigError("/lags", "expected an array of integers");
    for (std::size_t k = 0; k < it->size(); ++k) {
      if (!(*it)[k].is_number_integer() || (*it)[k].get<int>() < 1)
        throw ConfigError("/lags/" + std::to_string(k), "expected a positive integer");
      lags.push_back((*it)[k].get<int>());
    }
  }
  OrderedJson out;
  OrderedJson auto_json = OrderedJson::array();
  CsvTable t;
  t.header = {"quantity", "lag", "value"};
  for (int lag : lags) {
    const double v = autocorrelation_service(m, lag);
    auto_json.push_back({{"lag", lag}, {"value", v}});
    t.rows.push_back({std::string("service_autocorrelation"), static_cast<double>(lag), v});
  }
  out["service_autocorrelation"] = auto_json;
  const CrossCorrelation cc = cross_correlation(m);
  out["cross_correlation"] = {{"next_interarrival", cc.next_interarrival}, {"same_state", cc.same_state}};
  t.rows.push_back({std::string("crosscorr_next_interarrival"), {}, cc.next_interarrival});
  t.rows.push_back({std::string("crosscorr_same_state"), {}, cc.same_state});
  emit(o, o.format == "csv" ? write_csv(t) : out.dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const Options& o) {
  const Json j = load_json(o.config);
  std::string what;
  if (j.contains("transient")) {
    load_transient(j);
    what = "transient";
  } else if (j.contains("parameter")) {
    parse_sweep(j, std::filesystem::path(o.config).parent_path().string());
    what = "sweep";
  } else {
    load_model(j);
    what = "model";
  }
  emit(o, OrderedJson{{"valid", true}, {"config", what}}.dump() + "\n");
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
  CLI::App app{"Markov-modulated reflected autoregressive workload solver"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool seed) {
    sub->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--tolerance", o.tolerance, "truncation tolerance (default 1e-7 or $ARQ_TOLERANCE)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    if (seed) sub->add_option("--seed", o.seed, "simulation seed");
  };
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    bool seed;
    const char* format;
  };
  const Entry entries[] = {
      {"solve", "stationary transform (solver chosen from the config)", cmd_solve, false, "json"},
      {"transient", "transient transform batch", cmd_transient, false, "csv"},
      {"simulate", "Monte Carlo estimates", cmd_simulate, true, "json"},
      {"sweep", "parameter sweep to CSV", cmd_sweep, true, "csv"},
      {"correlations", "service autocorrelation and service/interarrival cross-correlation", cmd_correlations, false, "json"},
      {"validate", "check a configuration", cmd_validate, false, "json"},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, e.seed);
    subs.emplace_back(sub, &e);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  for (const auto& [sub, e] : subs) {
    if (!sub->parsed()) continue;
    if (sub->get_option("--format")->count() == 0) o.format = e->format;
    try {
      return e->run(o);
    } catch (const ConfigError& err) {
      diagnostic("error", err.what(), "ConfigError");
      return kExitConfig;
    } catch (const Error& err) {
      diagnostic("error", err.what(), to_string(err.code()));
      return err.code() == ErrorCode::InvalidSpec ? kExitConfig : kExitSolver;
    } catch (const std::exception& err) {
      diagnostic("error", err.what());
      return kExitSolver;
    }
  }
  return kExitConfig;
}

}  // namespace arq::app
