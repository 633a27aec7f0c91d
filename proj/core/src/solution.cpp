#include "arq/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace arq {

const char* to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::Exponential: return "exponential";
    case SolverKind::MixedErlang: return "mixed_erlang";
    case SolverKind::Fgm: return "fgm";
    case SolverKind::Bme: return "bme";
    case SolverKind::ShotNoise: return "shot_noise";
    case SolverKind::WaitDependent: return "wait_dependent";
  }
  return "unknown";
}

const char* to_string(BoundaryVector::Kind kind) noexcept {
  switch (kind) {
    case BoundaryVector::Kind::ExpV: return "exp_v";
    case BoundaryVector::Kind::FgmV: return "fgm_v";
    case BoundaryVector::Kind::ErlangDeriv: return "erlang_derivatives";
    case BoundaryVector::Kind::BmePoly: return "bme_polynomial";
    case BoundaryVector::Kind::ShotNoiseR: return "shot_noise_r";
    case BoundaryVector::Kind::WaitDepV: return "wait_dependent_v";
  }
  return "unknown";
}

StationarySolution::StationarySolution(SolverKind kind, RVector pi, FixedPointProblem problem,
                                       BoundaryVector boundary, std::vector<SeriesDiagnostic> diagnostics,
                                       TruncationPolicy policy)
    : kind_(kind),
      pi_(std::move(pi)),
      problem_(std::move(problem)),
      boundary_(std::move(boundary)),
      diagnostics_(std::move(diagnostics)),
      policy_(policy) {}

TransformResult StationarySolution::evaluate(Complex s) const { return evaluate_removable(problem_, s, policy_); }

TransformResult StationarySolution::evaluate_series(Complex s) const {
  BlockResult b = iterate_block(problem_, Jet(s), policy_);
  TransformResult r;
  r.value = b.value.value().col(0);
  r.terms_used = b.terms;
  r.residual = b.residual;
  r.monotone = b.monotone;
  r.factor_bound_binding = b.factor_bound_binding;
  return r;
}

CVector StationarySolution::derivative(Complex s, int k) const {
  if (k < 0 || k > kMaxJetOrder) throw Error(ErrorCode::InvalidSpec, "derivative order out of range");
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  const double guard = 1e-2 * std::max(1.0, std::abs(s));
  if (preimage_distance(problem_.shift, problem_.poles, s) < guard) {
    // Cauchy integral on a circle that avoids every pre-image; keeps the regular part.
    constexpr int kPoints = 64;
    double radius = 4.0 * guard;
    for (int attempt = 0; attempt < 8; ++attempt, radius *= 1.7) {
      bool clear = true;
      for (int m = 0; m < kPoints && clear; ++m) {
        const Complex w = s + std::polar(radius, 2.0 * std::numbers::pi * (m + 0.5) / kPoints);
        clear = preimage_distance(problem_.shift, problem_.poles, w) >= 0.5 * guard;
      }
      if (!clear) continue;
      CVector acc = CVector::Zero(n_states());
      for (int m = 0; m < kPoints; ++m) {
        const double angle = 2.0 * std::numbers::pi * (m + 0.5) / kPoints;
        BlockResult b = iterate_block(problem_, Jet(s + std::polar(radius, angle)), policy_);
        acc += b.value.value().col(0) * std::polar(1.0, -k * angle);
      }
      return acc * (fact / (kPoints * std::pow(radius, k)));
    }
  }
  BlockResult b = iterate_block(problem_, Jet::variable(s, k), policy_);
  return b.value[k].col(0) * fact;
}

RVector StationarySolution::mean() const { return -derivative(0.0, 1).real(); }

RVector StationarySolution::second_moment() const { return derivative(0.0, 2).real(); }

BlockResult iterate_block_removable(const FixedPointProblem& problem, Complex s, const TruncationPolicy& policy) {
  const double guard = 1e-2 * std::max(1.0, std::abs(s));
  if (preimage_distance(problem.shift, problem.poles, s) >= guard) return iterate_block(problem, Jet(s), policy);

  constexpr int kPoints = 64;
  double radius = 4.0 * guard;
  for (int attempt = 0; attempt < 8; ++attempt, radius *= 1.7) {
    bool clear = true;
    for (int k = 0; k < kPoints && clear; ++k) {
      const Complex w = s + std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / kPoints);
      clear = preimage_distance(problem.shift, problem.poles, w) >= 0.5 * guard;
    }
    if (!clear) continue;
    BlockResult acc;
    for (int k = 0; k < kPoints; ++k) {
      const Complex w = s + std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / kPoints);
      BlockResult r = iterate_block(problem, Jet(w), policy);
      if (k == 0) {
        acc = std::move(r);
      } else {
        acc.value += r.value;
        acc.terms.sum_terms = std::max(acc.terms.sum_terms, r.terms.sum_terms);
        acc.terms.product_terms = std::max(acc.terms.product_terms, r.terms.product_terms);
        acc.residual = std::max(acc.residual, r.residual);
        acc.monotone = acc.monotone && r.monotone;
        acc.factor_bound_binding = acc.factor_bound_binding || r.factor_bound_binding;
      }
    }
    acc.value *= Complex(1.0 / kPoints);
    return acc;
  }
  return iterate_block(problem, Jet(s), policy);
}

TransformResult evaluate_removable(const FixedPointProblem& problem, Complex s, const TruncationPolicy& policy) {
  BlockResult b = iterate_block_removable(problem, s, policy);
  TransformResult r;
  r.value = b.value.value().col(0);
  r.terms_used = b.terms;
  r.residual = b.residual;
  r.monotone = b.monotone;
  r.factor_bound_binding = b.factor_bound_binding;
  return r;
}

FixedPointProblem resolve_problem(const FixedPointProblem& augmented, const CVector& unknowns) {
  const Eigen::Index k = unknowns.size();
  CMatrix weights(k + 1, 1);
  weights.topRows(k) = unknowns;
  weights(k, 0) = 1.0;
  FixedPointProblem out;
  out.H = augmented.H;
  auto v = augmented.V;
  out.V = [v, weights](const Jet& s) { return v(s) * weights; };
  out.tail = augmented.tail.cols() > 0 ? CMatrix(augmented.tail * weights) : CMatrix();
  out.shift = augmented.shift;
  out.poles = augmented.poles;
  return out;
}

LinearSolve solve_linear(const CMatrix& a, const CVector& b) {
  LinearSolve out;
  if (a.rows() == 0) return out;
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double rcond = lu.rcond();
  out.condition_number = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(out.condition_number <= 1e12)) {
    throw Error(ErrorCode::SingularSystem, "boundary system condition estimate " + std::to_string(out.condition_number));
  }
  out.x = lu.solve(b);
  out.residual = max_abs(CVector(a * out.x - b));
  if (!std::isfinite(out.residual)) throw Error(ErrorCode::SingularSystem, "non-finite boundary solution");
  return out;
}

}  // namespace arq
