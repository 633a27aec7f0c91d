#pragma once

#include <functional>
#include <vector>

#include "arq/jet.hpp"
#include "arq/types.hpp"

namespace arq {

/// Contraction applied to the transform argument between recursion steps.
class ShiftMap {
 public:
  enum class Kind { Scale, ExpScale, Translate };

  /// s -> a s
  static ShiftMap scale(double a);
  /// s -> s exp(-r t)
  static ShiftMap exp_scale(double r, double t);
  /// s -> s + delta
  static ShiftMap translate(double delta);

  Kind kind() const noexcept { return kind_; }
  double factor() const noexcept { return factor_; }
  double offset() const noexcept { return offset_; }

  Complex operator()(Complex s) const { return factor_ * s + offset_; }
  Jet operator()(const Jet& s) const { return Jet(factor_) * s + Jet(offset_); }

 private:
  ShiftMap(Kind kind, double factor, double offset) : kind_(kind), factor_(factor), offset_(offset) {}

  Kind kind_;
  double factor_;
  double offset_;
};

/// Increment-norm stopping rule.
struct TruncationPolicy {
  double tolerance = 1e-7;
  int max_terms = 10000;

  /// Default policy with the tolerance overridden by ARQ_TOLERANCE when set.
  static TruncationPolicy from_environment();
};

inline constexpr const char* kToleranceEnvVar = "ARQ_TOLERANCE";

/// Number of terms kept in the additive series and factors kept in the product.
struct SeriesCounts {
  int sum_terms = 0;
  int product_terms = 0;
};

struct TransformResult {
  CVector value;
  SeriesCounts terms_used;
  double residual = 0.0;
  bool monotone = true;
  /// Translate maps only: the increment was small but the factor-norm guard kept iterating.
  bool factor_bound_binding = false;
};

/// Maps a (jet) argument to a matrix jet.
using MatrixFunction = std::function<MatrixJet(const Jet&)>;

/// Z(s) = H(s) Z(shift(s)) + V(s) with a block right-hand side.
///
/// V returns an N x C block; the solution is the N x C block
/// sum_n [prod_{m<n} H(s_m)] V(s_n) + [prod_m H(s_m)] tail, s_m = shift^m(s).
/// A tail with zero columns drops the product term.
struct FixedPointProblem {
  MatrixFunction H;
  MatrixFunction V;
  CMatrix tail;
  ShiftMap shift = ShiftMap::scale(0.5);
  std::vector<Complex> poles;
};

struct BlockResult {
  MatrixJet value;
  SeriesCounts terms;
  double residual = 0.0;
  bool monotone = true;
  bool factor_bound_binding = false;
};

/// Evaluates the truncated series at a jet argument; derivatives follow from the jet order.
/// Throws NoConvergence or PoleOnOrbit.
BlockResult iterate_block(const FixedPointProblem& problem, const Jet& s, const TruncationPolicy& policy);

/// Vector form of iterate_block; an empty `tail` drops the product term.
TransformResult iterate_fixed_point(const MatrixFunction& H, const MatrixFunction& V, const ShiftMap& shift,
                                    const CVector& tail, Complex s, const TruncationPolicy& policy,
                                    const std::vector<Complex>& poles = {});

/// lim_n prod_{m<=n} H(shift^m(s)) limit; `factors_used` receives the stopping count.
CVector product_tail(const MatrixFunction& H, const ShiftMap& shift, const CVector& limit, Complex s,
                     const TruncationPolicy& policy, int* factors_used = nullptr,
                     const std::vector<Complex>& poles = {});

/// k-th derivative in s of the truncated series, by Taylor-jet arithmetic.
CVector derivative_series(int k, const MatrixFunction& H, const MatrixFunction& V, const ShiftMap& shift,
                          const CVector& tail, Complex s, const TruncationPolicy& policy,
                          const std::vector<Complex>& poles = {});

/// Smallest distance from s to a point whose orbit meets a pole.
double preimage_distance(const ShiftMap& shift, const std::vector<Complex>& poles, Complex s);

inline constexpr double kPoleTolerance = 1e-9;

}  // namespace arq
