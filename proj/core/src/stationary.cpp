#include "arq/stationary.hpp"

#include <cmath>
#include <sstream>

#include "arq/related.hpp"
#include "boundary.hpp"

namespace arq {

namespace {

std::vector<Jet> lst_vector(const std::vector<Distribution>& d, const Jet& s) {
  std::vector<Jet> out;
  out.reserve(d.size());
  for (const auto& x : d) out.push_back(x.lst(s));
  return out;
}

std::vector<Jet> kernel_vector(const std::vector<Distribution>& d, const Jet& s) {
  std::vector<Jet> out;
  out.reserve(d.size());
  for (const auto& x : d) out.push_back(x.fgm_kernel(s));
  return out;
}

/// diag(k lambda_j / (k lambda_j - s)).
std::vector<Jet> arrival_factor(const std::vector<double>& rates, const Jet& s, double k = 1.0) {
  std::vector<Jet> out;
  out.reserve(rates.size());
  for (double l : rates) out.push_back(Jet(k * l) / (Jet(k * l) - s));
  return out;
}

const std::vector<double>& exponential_rates(const ModelSpec& spec, const char* solver) {
  const auto* arr = std::get_if<ExponentialArrivals>(&spec.arrivals);
  if (arr == nullptr) throw Error(ErrorCode::InvalidSpec, std::string(solver) + " solver needs exponential arrivals");
  return arr->rates;
}

void require_autoregressive(const ModelSpec& spec, const char* solver) {
  if (!std::holds_alternative<AutoregressiveKind>(spec.kind))
    throw Error(ErrorCode::InvalidSpec, std::string(solver) + " solver needs the autoregressive model kind");
}

CMatrix transposed_chain(const ModelSpec& spec) { return spec.chain.transition().transpose().cast<Complex>(); }

void check_probability_vector(StationarySolution& sol, const CVector& v, const char* name) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    std::ostringstream w;
    if (std::abs(v(j).imag()) > 1e-9) {
      w << name << "[" << j << "] has imaginary part " << v(j).imag();
    } else if (!(v(j).real() > 0.0 && v(j).real() <= 1.0 + 1e-9)) {
      w << name << "[" << j << "] = " << v(j).real() << " outside (0,1]";
    } else {
      continue;
    }
    sol.add_warning(w.str());
  }
}

std::string state_label(const char* what, Eigen::Index j) { return std::string(what) + " state " + std::to_string(j); }

// FGM block problem; theta = 0 gives the conditionally independent exponential model.
// Unknown columns are v1 (N) then v2 (N, only when theta != 0).
struct FgmAssembly {
  FixedPointProblem aug;
  Eigen::Index unknowns;
};

FgmAssembly fgm_assembly(const ModelSpec& spec, double theta) {
  const auto& lam = exponential_rates(spec, "FGM");
  const Eigen::Index n = spec.n_states();
  const bool coupled = theta != 0.0;
  const Eigen::Index k = coupled ? 2 * n : n;
  const CMatrix pt = transposed_chain(spec);
  const auto services = spec.services;

  FgmAssembly out;
  out.unknowns = k;
  out.aug.H = [pt, lam, services, theta, coupled](const Jet& s) {
    MatrixJet h = MatrixJet(pt).scale_cols(lst_vector(services, s));
    if (coupled) {
      std::vector<Jet> one_minus_l2 = arrival_factor(lam, s, 2.0);
      for (auto& x : one_minus_l2) x = Jet(theta) * (Jet(1.0) - x);
      h += MatrixJet(pt).scale_cols(kernel_vector(services, s)).scale_rows(one_minus_l2);
    }
    return h.scale_rows(arrival_factor(lam, s));
  };
  out.aug.V = [lam, n, k, theta, coupled](const Jet& s) {
    MatrixJet v(n, k + 1, s.order());
    const auto l1 = arrival_factor(lam, s);
    for (Eigen::Index j = 0; j < n; ++j) v.set_entry(j, j, Jet(1.0) - l1[static_cast<std::size_t>(j)]);
    if (coupled) {
      const auto l2 = arrival_factor(lam, s, 2.0);
      for (Eigen::Index j = 0; j < n; ++j)
        v.set_entry(j, n + j, Jet(theta) * (Jet(1.0) - l2[static_cast<std::size_t>(j)]));
    }
    return v;
  };
  out.aug.tail = CMatrix::Zero(n, k + 1);
  out.aug.tail.col(k) = stationary_distribution(spec.chain).cast<Complex>();
  out.aug.shift = ShiftMap::scale(spec.a);
  for (double l : lam) {
    out.aug.poles.emplace_back(l);
    if (coupled) out.aug.poles.emplace_back(2.0 * l);
  }
  return out;
}

StationarySolution solve_fgm_family(const ModelSpec& spec, double theta, SolverKind kind,
                                    const TruncationPolicy& policy) {
  const auto& lam = exponential_rates(spec, to_string(kind));
  const Eigen::Index n = spec.n_states();
  const RMatrix& p = spec.chain.transition();
  FgmAssembly as = fgm_assembly(spec, theta);
  const Eigen::Index k = as.unknowns;

  CMatrix a = CMatrix::Identity(k, k);
  CVector b = CVector::Zero(k);
  std::vector<SeriesDiagnostic> diags;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lj = lam[static_cast<std::size_t>(j)];
    BlockResult blk = iterate_block_removable(as.aug, spec.a * lj, policy);
    diags.push_back({state_label("boundary series at a*lambda,", j), blk.terms, blk.residual});
    CMatrix row(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& svc = spec.services[static_cast<std::size_t>(i)];
      Complex c = svc.lst(Complex(lj));
      if (k > n) c -= theta * svc.fgm_kernel(Jet(lj)).value();
      row(0, i) = p(i, j) * c;
    }
    CMatrix z = row * blk.value.value();
    a.row(j) -= z.leftCols(k);
    b(j) += z(0, k);

    if (k > n) {
      BlockResult blk2 = iterate_block_removable(as.aug, 2.0 * spec.a * lj, policy);
      diags.push_back({state_label("boundary series at 2a*lambda,", j), blk2.terms, blk2.residual});
      for (Eigen::Index i = 0; i < n; ++i)
        row(0, i) = p(i, j) * spec.services[static_cast<std::size_t>(i)].fgm_kernel(Jet(2.0 * lj)).value();
      CMatrix z2 = row * blk2.value.value();
      a.row(n + j) -= z2.leftCols(k);
      b(n + j) += z2(0, k);
    }
  }
  LinearSolve sol = solve_linear(a, b);

  BoundaryVector bv;
  bv.kind = kind == SolverKind::Fgm ? BoundaryVector::Kind::FgmV : BoundaryVector::Kind::ExpV;
  bv.values = sol.x;
  bv.condition_number = sol.condition_number;
  bv.residual = sol.residual;
  StationarySolution out(kind, stationary_distribution(spec.chain), resolve_problem(as.aug, sol.x), bv,
                         std::move(diags), policy);
  check_probability_vector(out, sol.x.head(n), "v");
  return out;
}

}  // namespace

StationarySolution solve_exponential(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  require_autoregressive(spec, "exponential");
  if (!std::holds_alternative<IndependentDependence>(spec.dependence))
    throw Error(ErrorCode::InvalidSpec, "exponential solver needs conditionally independent services");
  StationarySolution out = solve_fgm_family(spec, 0.0, SolverKind::Exponential, policy);

  // Closed-form mean: M = (a P^T - I)^{-1} (Phi pi - Lambda^{-1} v),
  // Phi = L'(0) P^T + P^T B*'(0) = diag(1/lambda) P^T - P^T diag(E S).
  const auto& lam = exponential_rates(spec, "exponential");
  const Eigen::Index n = spec.n_states();
  const RMatrix pt = spec.chain.transition().transpose();
  RVector inv_lam(n);
  RVector service_mean(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_lam(i) = 1.0 / lam[static_cast<std::size_t>(i)];
    service_mean(i) = spec.services[static_cast<std::size_t>(i)].mean();
  }
  const RMatrix phi = inv_lam.asDiagonal() * pt - pt * service_mean.asDiagonal();
  const RVector rhs = phi * out.pi() - inv_lam.cwiseProduct(out.boundary().values.real());
  const RMatrix lhs = spec.a * pt - RMatrix::Identity(n, n);
  LinearSolve ls = solve_linear(lhs.cast<Complex>(), rhs.cast<Complex>());
  out.set_closed_form_mean(ls.x.real());
  return out;
}

RVector mean_workload(const StationarySolution& solution) {
  if (!solution.closed_form_mean())
    throw Error(ErrorCode::InvalidSpec, "closed-form mean needs an exponential-arrival solution");
  return *solution.closed_form_mean();
}

StationarySolution solve_fgm(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  require_autoregressive(spec, "FGM");
  const auto* fgm = std::get_if<FgmDependence>(&spec.dependence);
  if (fgm == nullptr) throw Error(ErrorCode::InvalidSpec, "FGM solver needs FGM dependence");
  for (const auto& s : spec.services)
    if (!s.has_density()) throw Error(ErrorCode::InvalidSpec, "FGM solver needs services with a density");
  return solve_fgm_family(spec, fgm->theta, SolverKind::Fgm, policy);
}

StationarySolution solve_mixed_erlang(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  require_autoregressive(spec, "mixed-Erlang");
  if (!std::holds_alternative<IndependentDependence>(spec.dependence))
    throw Error(ErrorCode::InvalidSpec, "mixed-Erlang solver needs conditionally independent services");
  const auto* arr = std::get_if<MixedErlangArrivals>(&spec.arrivals);
  if (arr == nullptr) throw Error(ErrorCode::InvalidSpec, "mixed-Erlang solver needs mixed-Erlang arrivals");

  const Eigen::Index n = spec.n_states();
  const int m_phases = static_cast<int>(arr->weights.size());
  if (m_phases - 1 > kMaxJetOrder) throw Error(ErrorCode::InvalidSpec, "too many Erlang phases");
  const std::vector<double> lam = arr->rates;
  const std::vector<double> q = arr->weights;
  const double a = spec.a;
  const RMatrix& p = spec.chain.transition();
  const Eigen::Index total = n * n * m_phases;
  auto idx = [n, m_phases](Eigen::Index i, Eigen::Index j, int k) { return (j * n + i) * m_phases + k; };

  // coef[(j, i, k, l)] multiplies y_{ijk} against the l-th arrival kernel g_jl(s).
  std::vector<Complex> coef(static_cast<std::size_t>(total * m_phases));
  auto coef_at = [&](Eigen::Index i, Eigen::Index j, int k, int l) -> Complex& {
    return coef[static_cast<std::size_t>(idx(i, j, k) * m_phases + l)];
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lj = lam[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Jet beta = spec.services[static_cast<std::size_t>(i)].lst(Jet::variable(lj, m_phases - 1));
      for (int k = 0; k < m_phases; ++k) {
        double fact_l = 1.0;
        for (int l = 0; l < m_phases; ++l) {
          if (l > 0) fact_l *= l;
          if (l < k) continue;
          const double binom = std::tgamma(l + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(l - k + 1.0));
          coef_at(i, j, k, l) = std::pow(-lj, l) / fact_l * binom * p(i, j) * std::pow(a, k) * beta.derivative(l - k);
        }
      }
    }
  }

  const CMatrix pt = transposed_chain(spec);
  const auto services = spec.services;
  FixedPointProblem aug;
  aug.H = [pt, lam, q, services](const Jet& s) {
    std::vector<Jet> lhat;
    for (double l : lam) {
      const Jet w = Jet(l) / (Jet(l) - s);
      Jet acc(0.0, s.order());
      Jet wm(1.0);
      for (double qm : q) {
        wm *= w;
        acc += Jet(qm) * wm;
      }
      lhat.push_back(acc);
    }
    return MatrixJet(pt).scale_cols(lst_vector(services, s)).scale_rows(lhat);
  };
  aug.V = [lam, q, coef, n, m_phases, total, idx](const Jet& s) {
    MatrixJet v(n, total + 1, s.order());
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lj = lam[static_cast<std::size_t>(j)];
      const Jet w = Jet(lj) / (Jet(lj) - s);
      // g_l(s) = sum_{m>l} q_m (1 - w^{m-l}).
      std::vector<Jet> g(static_cast<std::size_t>(m_phases), Jet(0.0, s.order()));
      for (int l = 0; l < m_phases; ++l) {
        Jet wp(1.0);
        for (int m = l + 1; m <= m_phases; ++m) {
          wp *= w;
          g[static_cast<std::size_t>(l)] += Jet(q[static_cast<std::size_t>(m - 1)]) * (Jet(1.0) - wp);
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int k = 0; k < m_phases; ++k) {
          Jet e(0.0, s.order());
          for (int l = k; l < m_phases; ++l)
            e += Jet(coef[static_cast<std::size_t>(idx(i, j, k) * m_phases + l)]) * g[static_cast<std::size_t>(l)];
          v.set_entry(j, idx(i, j, k), e);
        }
      }
    }
    return v;
  };
  aug.tail = CMatrix::Zero(n, total + 1);
  aug.tail.col(total) = stationary_distribution(spec.chain).cast<Complex>();
  aug.shift = ShiftMap::scale(a);
  for (double l : lam) aug.poles.emplace_back(l);

  CMatrix sys = CMatrix::Identity(total, total);
  CVector rhs = CVector::Zero(total);
  std::vector<SeriesDiagnostic> diags;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lj = lam[static_cast<std::size_t>(j)];
    BlockResult blk = iterate_block(aug, Jet::variable(a * lj, m_phases - 1), policy);
    diags.push_back({state_label("derivative series at a*lambda,", j), blk.terms, blk.residual});
    double fact = 1.0;
    for (int k = 0; k < m_phases; ++k) {
      if (k > 0) fact *= k;
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = idx(i, j, k);
        sys.row(r) -= fact * blk.value[k].row(i).head(total);
        rhs(r) += fact * blk.value[k](i, total);
      }
    }
  }
  LinearSolve sol = solve_linear(sys, rhs);
  BoundaryVector bv{BoundaryVector::Kind::ErlangDeriv, sol.x, sol.condition_number, sol.residual, {}};
  return StationarySolution(SolverKind::MixedErlang, stationary_distribution(spec.chain), resolve_problem(aug, sol.x),
                            bv, std::move(diags), policy);
}

StationarySolution solve_bme(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  require_autoregressive(spec, "BME");
  const auto* bme = std::get_if<BmeDependence>(&spec.dependence);
  if (bme == nullptr) throw Error(ErrorCode::InvalidSpec, "BME solver needs a two-sided joint transform per pair");
  const Eigen::Index n = spec.n_states();
  const RMatrix& p = spec.chain.transition();

  std::vector<Complex> anchors;
  // entries[i][j] describes the pair (current i, next j).
  std::vector<std::vector<detail::FactoredEntry>> entries(static_cast<std::size_t>(n));
  detail::BoundarySetup setup;
  setup.roots.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      entries[static_cast<std::size_t>(i)].push_back(
          detail::factor_entry(bme->pairs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].joint, anchors));
      if (p(i, j) == 0.0) continue;
      const auto& right = entries[static_cast<std::size_t>(i)].back().right;
      auto& row = setup.roots[static_cast<std::size_t>(j)];
      row.insert(row.end(), right.begin(), right.end());
    }
  }

  setup.H = [entries, p, n](const Jet& s) {
    return MatrixJet::from_entries(n, n, s.order(), [&](Eigen::Index j, Eigen::Index i) {
      if (p(i, j) == 0.0) return Jet(0.0, s.order());
      return Jet(p(i, j)) * entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value(s);
    });
  };
  const auto roots = setup.roots;
  setup.cleared_row = [entries, p, n, roots](const Jet& s, Eigen::Index j) {
    return MatrixJet::from_entries(1, n, s.order(), [&](Eigen::Index, Eigen::Index i) {
      if (p(i, j) == 0.0) return Jet(0.0, s.order());
      return Jet(p(i, j)) * entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].cleared(
                                s, roots[static_cast<std::size_t>(j)]);
    });
  };
  const RVector pi = stationary_distribution(spec.chain);
  setup.tail = pi.cast<Complex>();
  setup.shift = ShiftMap::scale(spec.a);

  detail::BoundaryResult res = detail::solve_boundary(setup, policy);
  BoundaryVector bv{BoundaryVector::Kind::BmePoly, res.coefficients, res.condition_number, res.residual,
                    res.constant_terms};
  StationarySolution out(SolverKind::Bme, pi, res.problem, bv, std::move(res.diagnostics), policy);
  return out;
}

StationarySolution solve_stationary(const ModelSpec& spec, const TruncationPolicy& policy) {
  if (std::holds_alternative<ShotNoiseKind>(spec.kind)) return solve_shotnoise(spec, policy);
  if (std::holds_alternative<WaitDependentKind>(spec.kind)) return solve_waitdep(spec, policy);
  if (std::holds_alternative<FgmDependence>(spec.dependence)) return solve_fgm(spec, policy);
  if (std::holds_alternative<BmeDependence>(spec.dependence)) return solve_bme(spec, policy);
  if (std::holds_alternative<ServiceLinkedDependence>(spec.dependence))
    throw Error(ErrorCode::InvalidSpec, "service-linked dependence is solved by the transient solver");
  if (std::holds_alternative<MixedErlangArrivals>(spec.arrivals)) return solve_mixed_erlang(spec, policy);
  return solve_exponential(spec, policy);
}

ProductFormCounts product_form_counts(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  double theta = 0.0;
  if (const auto* f = std::get_if<FgmDependence>(&spec.dependence)) theta = f->theta;
  else if (!std::holds_alternative<IndependentDependence>(spec.dependence))
    throw Error(ErrorCode::InvalidSpec, "truncation counts need independent or FGM dependence");
  FgmAssembly as = fgm_assembly(spec, theta);
  const auto& lam = exponential_rates(spec, "truncation-count");
  const Eigen::Index n = spec.n_states();
  const CMatrix eye = CMatrix::Identity(n, n);
  auto u_at = [&](double x) { return as.aug.H(Jet(x)).value(); };
  auto one_minus_l = [&](int m, double x) {
    CMatrix d = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double l = (m + 1) * lam[static_cast<std::size_t>(j)];
      d(j, j) = 1.0 - l / (l - x);
    }
    return d;
  };

  ProductFormCounts out;
  out.n_states = n;
  out.sums.assign(static_cast<std::size_t>(4 * n), 0);
  out.products.assign(static_cast<std::size_t>(2 * n), 0);
  for (int pt = 0; pt < 2; ++pt) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double base = (pt + 1) * lam[static_cast<std::size_t>(j)];
      auto point = [&](int d) { return std::pow(spec.a, d + 1) * base; };
      // Summands prod_{d<k} U(x_d) (I - L_m(x_k)).
      for (int m = 0; m < 2; ++m) {
        CMatrix prefix = eye;
        CMatrix prev = one_minus_l(m, point(0));
        int k = 0;
        for (;; ++k) {
          if (k >= policy.max_terms) throw Error(ErrorCode::NoConvergence, "summand differences did not settle");
          prefix = prefix * u_at(point(k));
          CMatrix next = prefix * one_minus_l(m, point(k + 1));
          const bool done = max_abs(CMatrix(next - prev)) < policy.tolerance;
          prev = std::move(next);
          if (done) break;
        }
        out.sums[static_cast<std::size_t>((pt * 2 + m) * n + j)] = k + 1;
      }
      // Partial products prod_{d<=l} U(x_d).
      CMatrix prod = u_at(point(0));
      int l = 0;
      for (;; ++l) {
        if (l >= policy.max_terms) throw Error(ErrorCode::NoConvergence, "partial products did not settle");
        CMatrix next = prod * u_at(point(l + 1));
        const bool done = max_abs(CMatrix(next - prod)) < policy.tolerance;
        prod = std::move(next);
        if (done) break;
      }
      out.products[static_cast<std::size_t>(j * 2 + pt)] = l + 1;
    }
  }
  return out;
}

}  // namespace arq
