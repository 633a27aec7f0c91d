#include "arq/related.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace arq {

StationarySolution solve_shotnoise(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  const auto* sn = std::get_if<ShotNoiseKind>(&spec.kind);
  if (sn == nullptr) throw Error(ErrorCode::InvalidSpec, "shot-noise solver needs the shot-noise model kind");
  const double t = std::get<DeterministicArrivals>(spec.arrivals).t;
  const Eigen::Index n = spec.n_states();
  const ShiftMap shift = ShiftMap::exp_scale(sn->r, t);
  const double kappa = shift.factor();
  const double p = sn->p;
  const double q = 1.0 - p;
  const std::vector<double> nu = sn->negative_rates;
  const std::vector<Distribution> jumps = sn->jumps;
  const std::vector<Distribution> services = spec.services;
  const CMatrix pt = spec.chain.transition().transpose().cast<Complex>();

  // Z_j(s) = Ctilde_j(s) [P^T B*(k s) Z(k s)]_j - q s / (nu_j - s) r_j,
  // Ctilde_j(s) = p c*_j(s) + q nu_j / (nu_j - s).
  FixedPointProblem aug;
  aug.H = [pt, kappa, p, q, nu, jumps, services](const Jet& s) {
    const Jet ks = Jet(kappa) * s;
    std::vector<Jet> beta;
    std::vector<Jet> noise;
    for (std::size_t i = 0; i < services.size(); ++i) {
      beta.push_back(services[i].lst(ks));
      noise.push_back(Jet(p) * jumps[i].lst(s) + Jet(q * nu[i]) / (Jet(nu[i]) - s));
    }
    return MatrixJet(pt).scale_cols(beta).scale_rows(noise);
  };
  aug.V = [n, q, nu](const Jet& s) {
    MatrixJet v(n, n + 1, s.order());
    for (Eigen::Index j = 0; j < n; ++j) {
      const double l = nu[static_cast<std::size_t>(j)];
      v.set_entry(j, j, -Jet(q) * s / (Jet(l) - s));
    }
    return v;
  };
  const RVector pi = stationary_distribution(spec.chain);
  aug.tail = CMatrix::Zero(n, n + 1);
  aug.tail.col(n) = pi.cast<Complex>();
  aug.shift = shift;
  for (double l : nu) aug.poles.emplace_back(l);

  CMatrix a = CMatrix::Identity(n, n);
  CVector b = CVector::Zero(n);
  std::vector<SeriesDiagnostic> diags;
  const RMatrix& pm = spec.chain.transition();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = nu[static_cast<std::size_t>(j)] * kappa;
    BlockResult blk = iterate_block_removable(aug, x, policy);
    diags.push_back({"boundary series at nu*exp(-rt), state " + std::to_string(j), blk.terms, blk.residual});
    CMatrix row(1, n);
    for (Eigen::Index i = 0; i < n; ++i) row(0, i) = pm(i, j) * services[static_cast<std::size_t>(i)].lst(Complex(x));
    CMatrix z = row * blk.value.value();
    a.row(j) -= z.leftCols(n);
    b(j) += z(0, n);
  }
  LinearSolve sol = solve_linear(a, b);
  BoundaryVector bv{BoundaryVector::Kind::ShotNoiseR, sol.x, sol.condition_number, sol.residual, {}};
  return StationarySolution(SolverKind::ShotNoise, pi, resolve_problem(aug, sol.x), bv, std::move(diags), policy);
}

WaitDepSpectrum waitdep_spectrum(const ModelSpec& spec) {
  const auto& lam = arrival_rates(spec);
  const Eigen::Index n = spec.n_states();
  RVector l(n);
  for (Eigen::Index i = 0; i < n; ++i) l(i) = lam[static_cast<std::size_t>(i)];
  const RMatrix g = l.asDiagonal() * (RMatrix::Identity(n, n) - spec.chain.transition().transpose());
  Eigen::EigenSolver<RMatrix> es(g);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::DegenerateSpectrum, "eigen-decomposition failed");
  CVector gamma = es.eigenvalues();
  CMatrix right = es.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return std::abs(gamma(x)) < std::abs(gamma(y)); });
  WaitDepSpectrum out;
  out.gamma.resize(n);
  out.right.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.gamma(k) = gamma(order[static_cast<std::size_t>(k)]);
    out.right.col(k) = right.col(order[static_cast<std::size_t>(k)]);
  }
  const double scale = std::max(1.0, l.maxCoeff());
  if (std::abs(out.gamma(0)) > 1e-10 * scale)
    throw Error(ErrorCode::DegenerateSpectrum, "no zero eigenvalue of Lambda(I - P^T)");
  out.gamma(0) = 0.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (!(out.gamma(k).real() > 0.0))
      throw Error(ErrorCode::DegenerateSpectrum, "nonzero eigenvalue of Lambda(I - P^T) off the right half plane");
    for (Eigen::Index m = 0; m < k; ++m)
      if (std::abs(out.gamma(k) - out.gamma(m)) < 1e-8)
        throw Error(ErrorCode::DegenerateSpectrum, "repeated eigenvalue of Lambda(I - P^T)");
  }

  Eigen::PartialPivLU<CMatrix> lu(out.right);
  out.left = lu.inverse();
  const CVector pi = stationary_distribution(spec.chain).cast<Complex>();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index arg = 0;
    out.left.row(k).cwiseAbs().maxCoeff(&arg);
    out.left.row(k) /= out.left(k, arg);
  }
  if ((out.left.row(0) * pi)(0).real() < 0.0) out.left.row(0) *= -1.0;
  return out;
}

StationarySolution solve_waitdep(const ModelSpec& spec, const TruncationPolicy& policy) {
  require_valid(spec);
  const auto* wd = std::get_if<WaitDependentKind>(&spec.kind);
  if (wd == nullptr) throw Error(ErrorCode::InvalidSpec, "wait-dependent solver needs the wait-dependent model kind");
  const Eigen::Index n = spec.n_states();
  const double mu = wd->mu;
  const double delta = mu * wd->c;
  const WaitDepSpectrum sp = waitdep_spectrum(spec);
  const CMatrix right = sp.right;
  const CMatrix right_inv = Eigen::PartialPivLU<CMatrix>(sp.right).inverse();
  const CVector gamma = sp.gamma;
  const auto& lam = arrival_rates(spec);
  RVector l(n);
  for (Eigen::Index i = 0; i < n; ++i) l(i) = lam[static_cast<std::size_t>(i)];
  const CMatrix lpt = (l.asDiagonal() * spec.chain.transition().transpose()).cast<Complex>();

  // A(s) = s (sI - Lambda(I - P^T))^{-1} = R diag(s / (s - gamma)) R^{-1}, the gamma = 0 term being 1.
  auto a_of = [right, right_inv, gamma, n](const Jet& s) {
    std::vector<Jet> d;
    d.emplace_back(1.0, s.order());
    for (Eigen::Index k = 1; k < n; ++k) d.push_back(s / (s - Jet(gamma(k))));
    return right * MatrixJet::diagonal(d) * right_inv;
  };
  FixedPointProblem aug;
  aug.H = [a_of, lpt, mu, n](const Jet& s) {
    return (a_of(s) * lpt).scale_rows(std::vector<Jet>(static_cast<std::size_t>(n), reciprocal(Jet(mu) + s)));
  };
  aug.V = [a_of, n](const Jet& s) {
    MatrixJet a = a_of(s);
    MatrixJet v(n, n + 1, s.order());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) v.set_entry(i, j, a.entry(i, j));
    return v;
  };
  aug.shift = ShiftMap::translate(delta);
  for (Eigen::Index k = 1; k < n; ++k) aug.poles.push_back(gamma(k));

  const RVector pi = stationary_distribution(spec.chain);
  CMatrix sys(n, n);
  CVector rhs = CVector::Zero(n);
  std::vector<SeriesDiagnostic> diags;
  bool binding = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    BlockResult blk = iterate_block_removable(aug, gamma(k) + delta, policy);
    binding = binding || blk.factor_bound_binding;
    diags.push_back({"boundary series at gamma+mu*c, index " + std::to_string(k), blk.terms, blk.residual});
    const CMatrix y = sp.left.row(k);
    const CMatrix t = (y * lpt / (mu + gamma(k))) * blk.value.value();
    sys.row(k) = y + t.leftCols(n);
    if (k == 0) rhs(0) = (y * pi.cast<Complex>())(0);
  }
  LinearSolve sol = solve_linear(sys, rhs);
  BoundaryVector bv{BoundaryVector::Kind::WaitDepV, sol.x, sol.condition_number, sol.residual, {}};
  StationarySolution out(SolverKind::WaitDependent, pi, resolve_problem(aug, sol.x), bv, std::move(diags), policy);
  if (binding) out.add_warning("factor-norm guard kept the translated series running past the increment rule");
  const double idle = sol.x.real().sum();
  if (!(idle > 0.0 && idle < 1.0)) {
    std::ostringstream w;
    w << "sum of v = " << idle << " is not an idle probability in (0,1)";
    out.add_warning(w.str());
  }
  return out;
}

}  // namespace arq
