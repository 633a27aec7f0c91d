#include "arq/transient.hpp"

#include <cmath>

#include "boundary.hpp"

namespace arq {

namespace {

using JetGrid = std::vector<std::vector<Jet>>;

Jet jet_determinant(const JetGrid& m) {
  const std::size_t n = m.size();
  if (n == 0) return Jet(1.0);
  if (n == 1) return m[0][0];
  Jet acc(0.0, m[0][0].order());
  for (std::size_t c = 0; c < n; ++c) {
    JetGrid minor(n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) minor[r - 1].push_back(m[r][k]);
    const Jet term = m[0][c] * jet_determinant(minor);
    if (c % 2 == 0) acc += term;
    else acc -= term;
  }
  return acc;
}

/// adj(m)(i, j) = (-1)^{i+j} det(m without row j and column i).
JetGrid jet_adjugate(const JetGrid& m) {
  const std::size_t n = m.size();
  JetGrid out(n, std::vector<Jet>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      JetGrid minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<Jet> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      const Jet d = jet_determinant(minor);
      out[i][j] = (i + j) % 2 == 0 ? d : -d;
    }
  }
  return out;
}

/// M^T(z) = z I + Lambda - Q^T at z = eta - s.
JetGrid transposed_m(const RMatrix& q, const std::vector<double>& rates, Complex eta, const Jet& s) {
  const auto n = static_cast<std::size_t>(q.rows());
  JetGrid m(n, std::vector<Jet>(n));
  const Jet z = Jet(eta) - s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Jet e(-q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      if (i == j) e += z + Jet(rates[i]);
      m[i][j] = e;
    }
  return m;
}

void check_query(const TransientQuery& q) {
  if (!(std::abs(q.r) < 1.0)) throw Error(ErrorCode::InvalidSpec, "transient query needs |r| < 1");
  if (q.eta.real() < 0.0) throw Error(ErrorCode::InvalidSpec, "transient query needs Re(eta) >= 0");
}

MatrixFunction initial_forcing(Complex r, const RVector& initial, double w) {
  const CVector p = initial.cast<Complex>();
  return [r, p, w](const Jet& s) {
    const Jet e = Jet(r) * exp(Jet(-w) * s);
    MatrixJet f(p.size(), 1, s.order());
    for (Eigen::Index j = 0; j < p.size(); ++j) f.set_entry(j, 0, e * Jet(p(j)));
    return f;
  };
}

TransientResult finish(const detail::BoundaryResult& res, Complex s, const TruncationPolicy& policy) {
  TransientResult out;
  TransformResult t = evaluate_removable(res.problem, s, policy);
  out.value = t.value;
  out.terms_used = t.terms_used;
  out.residual = t.residual;
  const auto n = static_cast<Eigen::Index>(res.offsets.size());
  Eigen::Index deg = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index end = j + 1 < n ? res.offsets[static_cast<std::size_t>(j + 1)] : res.coefficients.size();
    deg = std::max(deg, end - res.offsets[static_cast<std::size_t>(j)]);
  }
  out.coefficients = CMatrix::Zero(deg, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index begin = res.offsets[static_cast<std::size_t>(j)];
    const Eigen::Index end = j + 1 < n ? res.offsets[static_cast<std::size_t>(j + 1)] : res.coefficients.size();
    for (Eigen::Index l = begin; l < end; ++l) out.coefficients(l - begin, j) = res.coefficients(l);
  }
  out.condition_number = res.condition_number;
  out.boundary_residual = res.residual;
  out.constant_terms = res.constant_terms;
  out.diagnostics = res.diagnostics;
  return out;
}

}  // namespace

std::vector<std::string> validate(const ModulatedArrivalSpec& spec) {
  std::vector<std::string> out;
  const Eigen::Index n = spec.n_states();
  if (n == 0 || spec.generator.cols() != n) {
    out.emplace_back("generator must be a nonempty square matrix");
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(spec.generator.row(i).sum()) > 1e-12) out.push_back("generator row " + std::to_string(i) + " must sum to 0");
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && spec.generator(i, j) < 0.0) out.emplace_back("generator off-diagonal entries must be nonnegative");
  }
  if (static_cast<Eigen::Index>(spec.rates.size()) != n) out.emplace_back("arrival needs one rate per state");
  for (double r : spec.rates)
    if (!(r > 0.0)) out.emplace_back("arrival rates must be positive");
  if (spec.initial.size() != n || (spec.initial.array() < 0.0).any() || std::abs(spec.initial.sum() - 1.0) > 1e-12)
    out.emplace_back("initial distribution must be a probability vector");
  if (!(spec.w >= 0.0)) out.emplace_back("initial workload must be nonnegative");
  return out;
}

EigenData eigen_mu(const ModulatedArrivalSpec& spec, Complex eta) {
  if (auto v = validate(spec); !v.empty()) throw Error(ErrorCode::InvalidSpec, v.front());
  const Eigen::Index n = spec.n_states();
  RMatrix m = -spec.generator.transpose();
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) += spec.rates[static_cast<std::size_t>(i)];
  Eigen::EigenSolver<RMatrix> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::DegenerateSpectrum, "eigen-decomposition failed");
  EigenData out;
  out.nu = es.eigenvalues();
  out.right = es.eigenvectors();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(out.nu(i).real() > 0.0))
      throw Error(ErrorCode::DegenerateSpectrum, "eigenvalue of Lambda - Q^T outside the right half plane");
    for (Eigen::Index k = 0; k < i; ++k)
      if (std::abs(out.nu(i) - out.nu(k)) < 1e-8)
        throw Error(ErrorCode::DegenerateSpectrum, "eigenvalues of Lambda - Q^T are not distinct");
  }
  out.mu = out.nu.array() + eta;
  return out;
}

TransientSolver::TransientSolver(ModulatedArrivalSpec spec, std::vector<Distribution> services, double a,
                                 TruncationPolicy policy)
    : spec_(std::move(spec)), services_(std::move(services)), a_(a), policy_(policy), eigen_(eigen_mu(spec_, 0.0)) {
  if (static_cast<Eigen::Index>(services_.size()) != spec_.n_states())
    throw Error(ErrorCode::InvalidSpec, "services need one distribution per state");
  for (const auto& s : services_)
    if (auto v = s.check(); !v.empty()) throw Error(ErrorCode::InvalidSpec, "service: " + v.front());
  if (!(a_ > 0.0 && a_ < 1.0)) throw Error(ErrorCode::InvalidSpec, "a must lie in (0,1)");
}

TransientResult TransientSolver::solve(const TransientQuery& query) const {
  check_query(query);
  const Eigen::Index n = spec_.n_states();
  const Complex r = query.r;
  const Complex eta = query.eta;
  const RMatrix q = spec_.generator;
  const std::vector<double> rates = spec_.rates;
  const std::vector<Distribution> services = services_;
  std::vector<Complex> mu;
  for (Eigen::Index i = 0; i < n; ++i) mu.push_back(eigen_.nu(i) + eta);

  auto betas = [services](const Jet& s) {
    std::vector<Jet> b;
    for (const auto& d : services) b.push_back(d.lst(s));
    return b;
  };
  std::vector<Jet> row_scale;
  for (double l : rates) row_scale.emplace_back(r * l);

  detail::BoundarySetup setup;
  // K(s) = r Lambda (M^T(eta - s))^{-1} B*(s).
  setup.H = [q, rates, eta, row_scale, betas, n](const Jet& s) {
    const JetGrid m = transposed_m(q, rates, eta, s);
    MatrixJet mj = MatrixJet::from_entries(n, n, s.order(), [&](Eigen::Index i, Eigen::Index j) {
      return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    });
    return mj.inverse().scale_rows(row_scale).scale_cols(betas(s));
  };
  setup.forcing = initial_forcing(r, spec_.initial, spec_.w);
  setup.shift = ShiftMap::scale(a_);
  setup.kernel_poles = mu;
  setup.roots.assign(static_cast<std::size_t>(n), mu);
  // prod_k (s - mu_k) (M^T(eta - s))^{-1} = (-1)^N adj(M^T(eta - s)).
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  setup.cleared_row = [q, rates, eta, r, sign, betas, n](const Jet& s, Eigen::Index j) {
    const JetGrid adj = jet_adjugate(transposed_m(q, rates, eta, s));
    const auto b = betas(s);
    const Jet lead = Jet(r * sign * rates[static_cast<std::size_t>(j)]);
    return MatrixJet::from_entries(1, n, s.order(), [&](Eigen::Index, Eigen::Index i) {
      return lead * adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    });
  };
  return finish(detail::solve_boundary(setup, policy_), query.s, policy_);
}

TransientResult solve_transient(const ModulatedArrivalSpec& spec, const std::vector<Distribution>& services, double a,
                                const TransientQuery& query, const TruncationPolicy& policy) {
  return TransientSolver(spec, services, a, policy).solve(query);
}

TransientResult solve_transient_service_linked(const ServiceLinkedDependence& dependence, const RVector& initial,
                                               double w, const std::vector<Distribution>& services, double a,
                                               const TransientQuery& query, const TruncationPolicy& policy) {
  check_query(query);
  const auto n = static_cast<Eigen::Index>(services.size());
  if (static_cast<Eigen::Index>(dependence.chi.size()) != n || static_cast<Eigen::Index>(dependence.psi.size()) != n)
    throw Error(ErrorCode::InvalidSpec, "service-linked dependence needs N x N chi and N psi entries");
  if (initial.size() != n) throw Error(ErrorCode::InvalidSpec, "initial distribution needs one entry per state");
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidSpec, "a must lie in (0,1)");
  const Complex r = query.r;
  const Complex eta = query.eta;

  // Entry (current i, next j) of the kernel: r chi_ij(eta - s) beta*_i(s + psi_i(eta - s)).
  // With psi_i = 0 the service transform stays an analytic factor; otherwise it is
  // composed rationally so that its right-half-plane poles are cleared as well.
  std::vector<Complex> anchors;
  std::vector<std::vector<detail::FactoredEntry>> entries(static_cast<std::size_t>(n));
  std::vector<bool> analytic(static_cast<std::size_t>(n));
  std::vector<std::vector<bool>> present(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  detail::BoundarySetup setup;
  setup.roots.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const RationalLST& psi = dependence.psi[ui];
    analytic[ui] = psi.is_zero();
    Polynomial bnum{1.0};
    Polynomial bden{1.0};
    if (!analytic[ui]) {
      const auto rat = services[ui].as_rational();
      if (!rat) throw Error(ErrorCode::InvalidSpec, "service-linked psi needs a rational service transform");
      const RationalLST shifted = psi.compose_affine(-1.0, eta);
      const Polynomial za = Polynomial({0.0, 1.0}) * shifted.denominator() + shifted.numerator();
      const Polynomial& zb = shifted.denominator();
      const int d = std::max(rat->numerator().degree(), rat->denominator().degree());
      auto compose = [&](const Polynomial& p) {
        Polynomial acc(std::vector<Complex>{Complex{}});
        for (int k = 0; k <= p.degree(); ++k)
          acc = acc + p.coeffs()[static_cast<std::size_t>(k)] * (za.power(k) * zb.power(d - k));
        return acc;
      };
      bnum = compose(rat->numerator());
      bden = compose(rat->denominator());
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const RationalLST chi = dependence.chi[ui][static_cast<std::size_t>(j)].compose_affine(-1.0, eta);
      present[ui][static_cast<std::size_t>(j)] = !chi.is_zero();
      const RationalLST entry(r * (chi.numerator() * bnum), chi.denominator() * bden);
      entries[ui].push_back(present[ui][static_cast<std::size_t>(j)] ? detail::factor_entry(entry, anchors)
                                                                      : detail::FactoredEntry{});
      if (!present[ui][static_cast<std::size_t>(j)]) continue;
      const auto& right = entries[ui].back().right;
      auto& row = setup.roots[static_cast<std::size_t>(j)];
      row.insert(row.end(), right.begin(), right.end());
    }
  }

  auto factor = [services, analytic](Eigen::Index i, const Jet& s) {
    return analytic[static_cast<std::size_t>(i)] ? services[static_cast<std::size_t>(i)].lst(s) : Jet(1.0, s.order());
  };
  setup.H = [entries, present, factor, n](const Jet& s) {
    return MatrixJet::from_entries(n, n, s.order(), [&](Eigen::Index j, Eigen::Index i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (!present[ui][uj]) return Jet(0.0, s.order());
      return entries[ui][uj].value(s) * factor(i, s);
    });
  };
  const auto roots = setup.roots;
  setup.cleared_row = [entries, present, factor, roots, n](const Jet& s, Eigen::Index j) {
    return MatrixJet::from_entries(1, n, s.order(), [&](Eigen::Index, Eigen::Index i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (!present[ui][uj]) return Jet(0.0, s.order());
      return entries[ui][uj].cleared(s, roots[uj]) * factor(i, s);
    });
  };
  setup.forcing = initial_forcing(r, initial, w);
  setup.shift = ShiftMap::scale(a);
  return finish(detail::solve_boundary(setup, policy), query.s, policy);
}

Complex determinant(const CMatrix& m) {
  JetGrid g(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[static_cast<std::size_t>(i)].emplace_back(m(i, j));
  return jet_determinant(g).value();
}

CMatrix adjugate(const CMatrix& m) {
  JetGrid g(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[static_cast<std::size_t>(i)].emplace_back(m(i, j));
  const JetGrid adj = jet_adjugate(g);
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) = adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].value();
  return out;
}

}  // namespace arq
