#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <thread>

#include "arq/metrics.hpp"
#include "arq/stationary.hpp"

namespace arq::app {

namespace {

Distribution scale_rate(const Distribution& d, double u) {
  if (const auto* e = std::get_if<Distribution::Exponential>(&d.variant())) return Distribution::exponential(e->rate / u);
  if (const auto* m = std::get_if<Distribution::MixedErlang>(&d.variant()))
    return Distribution::mixed_erlang(m->rate / u, m->weights);
  if (const auto* p = std::get_if<Distribution::Deterministic>(&d.variant()))
    return Distribution::deterministic(p->value * u);
  throw Error(ErrorCode::InvalidSpec, "u sweep needs exponential, Erlang-mixture or deterministic services");
}

bool has_counts(const ModelSpec& m) {
  return std::holds_alternative<AutoregressiveKind>(m.kind) && std::holds_alternative<ExponentialArrivals>(m.arrivals) &&
         (std::holds_alternative<IndependentDependence>(m.dependence) ||
          std::holds_alternative<FgmDependence>(m.dependence));
}

}  // namespace

ModelSpec apply_parameter(const ModelSpec& base, const std::string& parameter, double value) {
  ModelSpec m = base;
  if (parameter == "u") {
    if (!(value > 0.0)) throw Error(ErrorCode::InvalidSpec, "u must be positive");
    for (auto& s : m.services) s = scale_rate(s, value);
    if (auto* w = std::get_if<WaitDependentKind>(&m.kind)) w->mu /= value;
  } else if (parameter == "theta") {
    if (!std::holds_alternative<IndependentDependence>(m.dependence) && !std::holds_alternative<FgmDependence>(m.dependence))
      throw Error(ErrorCode::InvalidSpec, "theta sweep needs independent or FGM dependence");
    m.dependence = FgmDependence{value};
  } else if (parameter == "a") {
    m.a = value;
  } else {
    throw Error(ErrorCode::InvalidSpec, "unknown sweep parameter '" + parameter + "'");
  }
  return m;
}

SweepSpec parse_sweep(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("", "expected an object");
  SweepSpec s;
  auto load_curve = [&](const Json& c, const std::string& path) {
    if (auto it = c.find("model"); it != c.end()) return parse_model(*it, path + "/model");
    auto it = c.find("base");
    if (it == c.end() || !it->is_string()) throw ConfigError(path + "/base", "need a \"model\" object or a \"base\" path");
    std::filesystem::path p = it->get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    try {
      return parse_model(load_json(p.string()));
    } catch (const ConfigError& e) {
      throw ConfigError(path + "/base", std::string("in ") + p.string() + ": " + e.what());
    }
  };
  if (auto it = j.find("curves"); it != j.end()) {
    if (!it->is_array() || it->empty()) throw ConfigError("/curves", "expected a nonempty array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string path = "/curves/" + std::to_string(k);
      const Json& c = (*it)[k];
      if (!c.is_object() || !c.contains("name") || !c["name"].is_string())
        throw ConfigError(path + "/name", "each curve needs a name");
      s.curves.emplace_back(c["name"].get<std::string>(), load_curve(c, path));
    }
  } else {
    s.curves.emplace_back("base", load_curve(j, ""));
  }
  for (std::size_t k = 0; k < s.curves.size(); ++k)
    require_valid_config(s.curves[k].second, j.contains("curves") ? "/curves/" + std::to_string(k) : "");

  if (!j.contains("parameter") || !j["parameter"].is_string()) throw ConfigError("/parameter", "expected \"u\", \"theta\" or \"a\"");
  s.parameter = j["parameter"].get<std::string>();
  if (s.parameter != "u" && s.parameter != "theta" && s.parameter != "a")
    throw ConfigError("/parameter", "expected \"u\", \"theta\" or \"a\"");
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
    throw ConfigError("/values", "expected a nonempty array of numbers");
  for (std::size_t k = 0; k < j["values"].size(); ++k) {
    const Json& v = j["values"][k];
    if (!v.is_number()) throw ConfigError("/values/" + std::to_string(k), "expected a number");
    s.values.push_back(v.get<double>());
  }
  for (std::size_t k = 0; k < s.values.size(); ++k)
    for (const auto& [name, model] : s.curves) {
      try {
        const auto v = validate(apply_parameter(model, s.parameter, s.values[k]));
        if (!v.empty()) throw Error(ErrorCode::InvalidSpec, v.front());
      } catch (const Error& e) {
        throw ConfigError("/values/" + std::to_string(k), "curve " + name + ": " + e.what());
      }
    }

  if (auto it = j.find("outputs"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("/outputs", "expected an array");
    s.means = false;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string o = (*it)[k].is_string() ? (*it)[k].get<std::string>() : "";
      if (o == "mean") s.means = true;
      else if (o == "correlations") s.correlations = true;
      else if (o == "counts") s.counts = true;
      else if (o == "oracle") s.oracle = true;
      else throw ConfigError("/outputs/" + std::to_string(k), "expected mean, correlations, counts or oracle");
    }
  }
  s.sim = parse_sim_config(j.value("simulation", Json()), "/simulation");
  if (auto it = j.find("threads"); it != j.end()) {
    if (!it->is_number_integer()) throw ConfigError("/threads", "expected an integer");
    s.threads = it->get<int>();
  }
  return s;
}

SweepResult run_sweep(const SweepSpec& sweep, const TruncationPolicy& policy) {
  Eigen::Index n = 0;
  for (const auto& c : sweep.curves) n = std::max(n, c.second.n_states());

  CsvTable table;
  table.header = {"curve", sweep.parameter, "status"};
  if (sweep.means) {
    for (Eigen::Index j = 1; j <= n; ++j) table.header.push_back("mean_" + std::to_string(j));
    table.header.emplace_back("total_mean");
  }
  if (sweep.correlations)
    for (const char* h : {"autocorr_lag1", "crosscorr_next", "crosscorr_same"}) table.header.emplace_back(h);
  if (sweep.counts) {
    for (int nn = 1; nn <= 2; ++nn)
      for (int m = 1; m <= 2; ++m)
        for (Eigen::Index j = 1; j <= n; ++j)
          table.header.push_back("sum_m" + std::to_string(m) + "_j" + std::to_string(j) + "_n" + std::to_string(nn));
    for (Eigen::Index j = 1; j <= n; ++j)
      for (int nn = 1; nn <= 2; ++nn)
        table.header.push_back("prod_j" + std::to_string(j) + "_n" + std::to_string(nn));
  }
  if (sweep.oracle)
    for (const char* h : {"oracle_mean", "oracle_se"}) table.header.emplace_back(h);

  const std::size_t rows = sweep.curves.size() * sweep.values.size();
  table.rows.assign(rows, std::vector<CsvCell>(table.header.size()));
  std::vector<char> failed(rows, 0);

  auto run_row = [&](std::size_t r) {
    const auto& [name, base] = sweep.curves[r / sweep.values.size()];
    const double value = sweep.values[r % sweep.values.size()];
    auto& row = table.rows[r];
    row[0] = name;
    row[1] = value;
    std::size_t col = 3;
    try {
      const ModelSpec m = apply_parameter(base, sweep.parameter, value);
      if (sweep.means) {
        const StationarySolution sol = solve_stationary(m, policy);
        const RVector mean = sol.closed_form_mean() ? *sol.closed_form_mean() : sol.mean();
        for (Eigen::Index j = 0; j < mean.size(); ++j) row[col + static_cast<std::size_t>(j)] = mean(j);
        col += static_cast<std::size_t>(n);
        row[col++] = mean.sum();
      }
      if (sweep.correlations) {
        try {
          row[col] = autocorrelation_service(m, 1);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateVariance) throw;
        }
        if (std::holds_alternative<ExponentialArrivals>(m.arrivals) && has_counts(m)) {
          const CrossCorrelation cc = cross_correlation(m);
          row[col + 1] = cc.next_interarrival;
          row[col + 2] = cc.same_state;
        }
        col += 3;
      }
      if (sweep.counts) {
        if (has_counts(m)) {
          const ProductFormCounts pc = product_form_counts(m, policy);
          for (int nn = 0; nn < 2; ++nn)
            for (int mm = 0; mm < 2; ++mm)
              for (Eigen::Index j = 0; j < pc.n_states; ++j)
                row[col + static_cast<std::size_t>((nn * 2 + mm) * n + j)] = static_cast<double>(pc.sum(mm, j, nn));
          for (Eigen::Index j = 0; j < pc.n_states; ++j)
            for (int nn = 0; nn < 2; ++nn)
              row[col + static_cast<std::size_t>(4 * n + j * 2 + nn)] = static_cast<double>(pc.product(j, nn));
        }
        col += static_cast<std::size_t>(6 * n);
      }
      if (sweep.oracle) {
        SimConfig cfg = sweep.sim;
        cfg.threads = 1;
        const StationarySimResult sim = simulate_stationary(m, {}, cfg);
        row[col] = sim.total_mean.estimate;
        row[col + 1] = sim.total_mean.se;
      }
      row[2] = std::string("ok");
    } catch (const std::exception& e) {
      row[2] = std::string(e.what());
      failed[r] = 1;
    }
  };

  int threads = sweep.threads > 0 ? sweep.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(rows));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < rows; r = next++) run_row(r);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult out;
  out.table = std::move(table);
  out.failed_rows = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  return out;
}

}  // namespace arq::app
