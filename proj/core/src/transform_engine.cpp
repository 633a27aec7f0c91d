#include "arq/transform_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace arq {

ShiftMap ShiftMap::scale(double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidSpec, "scale shift needs a in (0,1)");
  return {Kind::Scale, a, 0.0};
}

ShiftMap ShiftMap::exp_scale(double r, double t) {
  if (!(r > 0.0 && t > 0.0)) throw Error(ErrorCode::InvalidSpec, "exponential shift needs r, t > 0");
  return {Kind::ExpScale, std::exp(-r * t), 0.0};
}

ShiftMap ShiftMap::translate(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidSpec, "translation shift needs delta > 0");
  return {Kind::Translate, 1.0, delta};
}

TruncationPolicy TruncationPolicy::from_environment() {
  TruncationPolicy p;
  if (const char* env = std::getenv(kToleranceEnvVar); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) p.tolerance = v;
  }
  return p;
}

namespace {

void check_poles(const std::vector<Complex>& poles, Complex z) {
  for (const auto& p : poles) {
    if (std::abs(z - p) < kPoleTolerance) {
      throw Error(ErrorCode::PoleOnOrbit, "orbit point (" + std::to_string(z.real()) + "," +
                                              std::to_string(z.imag()) + ") hits a registered pole");
    }
  }
}

constexpr double kTranslateFactorBound = 0.5;

}  // namespace

BlockResult iterate_block(const FixedPointProblem& problem, const Jet& s, const TruncationPolicy& policy) {
  const double tol = policy.tolerance;
  const bool translate = problem.shift.kind() == ShiftMap::Kind::Translate;

  Jet z = s;
  check_poles(problem.poles, z.value());
  MatrixJet first = problem.V(z);
  const Eigen::Index n = first.rows();
  const int order = s.order();

  BlockResult out;
  out.value = MatrixJet(n, first.cols(), order);
  MatrixJet prefix = MatrixJet::identity(n, order);
  const bool has_tail = problem.tail.cols() > 0;
  bool sum_done = false;
  bool prod_done = !has_tail;
  MatrixJet applied_prev;
  if (has_tail) applied_prev = MatrixJet(problem.tail);
  double sum_residual = 0.0;
  double prod_residual = 0.0;
  std::vector<double> history;

  for (int step = 0;; ++step) {
    if (step >= policy.max_terms) {
      throw Error(ErrorCode::NoConvergence, "series did not reach tolerance within " +
                                                std::to_string(policy.max_terms) + " terms");
    }
    if (step > 0) check_poles(problem.poles, z.value());
    const MatrixJet hz = problem.H(z);
    const double factor_norm = translate ? max_abs(hz.value()) : 0.0;

    if (!sum_done) {
      MatrixJet term = prefix * (step == 0 ? first : problem.V(z));
      const double norm = term.norm();
      out.value += term;
      history.push_back(norm);
      if (norm < tol) {
        if (translate && factor_norm >= kTranslateFactorBound) {
          out.factor_bound_binding = true;
        } else {
          sum_done = true;
          sum_residual = norm;
          out.terms.sum_terms = step + 1;
        }
      }
    }

    if (sum_done && prod_done) break;
    prefix = prefix * hz;

    if (!prod_done) {
      MatrixJet applied = prefix * problem.tail;
      const double diff = (applied - applied_prev).norm();
      applied_prev = std::move(applied);
      if (diff < tol && !(translate && factor_norm >= kTranslateFactorBound)) {
        prod_done = true;
        prod_residual = diff;
        out.terms.product_terms = step + 1;
      }
    }
    if (sum_done && prod_done) break;
    z = problem.shift(z);
  }

  if (has_tail) out.value += applied_prev;
  out.residual = std::max(sum_residual, prod_residual);
  // Eventual decay over the last few recorded increments.
  const std::size_t window = std::min<std::size_t>(history.size(), 6);
  for (std::size_t i = history.size() - window + 1; i < history.size(); ++i)
    if (history[i] > history[i - 1] * (1.0 + 1e-12) && history[i] > tol) out.monotone = false;
  return out;
}

namespace {

// An empty tail vector means no product term.
CMatrix tail_block(const CVector& tail) { return tail.size() == 0 ? CMatrix() : CMatrix(tail); }

}  // namespace

TransformResult iterate_fixed_point(const MatrixFunction& H, const MatrixFunction& V, const ShiftMap& shift,
                                    const CVector& tail, Complex s, const TruncationPolicy& policy,
                                    const std::vector<Complex>& poles) {
  FixedPointProblem p{H, V, tail_block(tail), shift, poles};
  BlockResult b = iterate_block(p, Jet(s), policy);
  TransformResult r;
  r.value = b.value.value().col(0);
  r.terms_used = b.terms;
  r.residual = b.residual;
  r.monotone = b.monotone;
  r.factor_bound_binding = b.factor_bound_binding;
  return r;
}

CVector product_tail(const MatrixFunction& H, const ShiftMap& shift, const CVector& limit, Complex s,
                     const TruncationPolicy& policy, int* factors_used, const std::vector<Complex>& poles) {
  const Eigen::Index n = limit.size();
  MatrixFunction zero = [n](const Jet& x) { return MatrixJet(n, 1, x.order()); };
  FixedPointProblem p{H, zero, CMatrix(limit), shift, poles};
  BlockResult b = iterate_block(p, Jet(s), policy);
  if (factors_used != nullptr) *factors_used = b.terms.product_terms;
  return b.value.value().col(0);
}

CVector derivative_series(int k, const MatrixFunction& H, const MatrixFunction& V, const ShiftMap& shift,
                          const CVector& tail, Complex s, const TruncationPolicy& policy,
                          const std::vector<Complex>& poles) {
  if (k < 0 || k > kMaxJetOrder) throw Error(ErrorCode::InvalidSpec, "derivative order out of range");
  FixedPointProblem p{H, V, tail_block(tail), shift, poles};
  BlockResult b = iterate_block(p, Jet::variable(s, k), policy);
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return b.value[k].col(0) * fact;
}

double preimage_distance(const ShiftMap& shift, const std::vector<Complex>& poles, Complex s) {
  if (poles.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  double min_pole = std::numeric_limits<double>::infinity();
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& p : poles) {
    min_pole = std::min(min_pole, std::abs(p));
    max_re = std::max(max_re, p.real());
  }
  Complex z = s;
  double scale = 1.0;  // derivative of the n-fold map
  for (int n = 0; n < 2000; ++n) {
    for (const auto& p : poles) best = std::min(best, std::abs(z - p) / scale);
    if (shift.kind() == ShiftMap::Kind::Translate) {
      if (z.real() > max_re + shift.offset()) break;
    } else if (std::abs(z) < 0.5 * min_pole) {
      break;
    }
    z = shift(z);
    scale *= shift.factor();
  }
  return best;
}

}  // namespace arq
