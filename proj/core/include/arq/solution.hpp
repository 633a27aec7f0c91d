#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arq/transform_engine.hpp"

namespace arq {

enum class SolverKind { Exponential, MixedErlang, Fgm, Bme, ShotNoise, WaitDependent };
const char* to_string(SolverKind kind) noexcept;

/// Resolved boundary unknowns of a stationary solve.
struct BoundaryVector {
  enum class Kind { ExpV, FgmV, ErlangDeriv, BmePoly, ShotNoiseR, WaitDepV };
  Kind kind = Kind::ExpV;
  CVector values;
  double condition_number = 0.0;
  double residual = 0.0;
  /// Two-sided solver only: constant polynomial terms recomputed from Z(0), expected to vanish.
  CVector constant_terms;
};
const char* to_string(BoundaryVector::Kind kind) noexcept;

/// Truncation counts of one series evaluated during assembly.
struct SeriesDiagnostic {
  std::string label;
  SeriesCounts counts;
  double residual = 0.0;
};

/// Immutable steady-state transform of the workload, indexed by background state.
class StationarySolution {
 public:
  StationarySolution(SolverKind kind, RVector pi, FixedPointProblem problem, BoundaryVector boundary,
                     std::vector<SeriesDiagnostic> diagnostics, TruncationPolicy policy);

  SolverKind kind() const noexcept { return kind_; }
  Eigen::Index n_states() const noexcept { return pi_.size(); }
  const RVector& pi() const noexcept { return pi_; }
  const BoundaryVector& boundary() const noexcept { return boundary_; }
  const std::vector<SeriesDiagnostic>& diagnostics() const noexcept { return diagnostics_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const FixedPointProblem& problem() const noexcept { return problem_; }
  const TruncationPolicy& policy() const noexcept { return policy_; }

  /// Z(s). Near a pre-image of a kernel pole the value is taken as a circle
  /// average, which removes the residual pole left by truncation.
  TransformResult evaluate(Complex s) const;
  /// Z(s) from the truncated series only.
  TransformResult evaluate_series(Complex s) const;
  /// k-th derivative of Z at s.
  CVector derivative(Complex s, int k) const;

  /// E[W 1{Y=i}] from the transform derivative at 0.
  RVector mean() const;
  /// E[W^2 1{Y=i}] from the second derivative at 0.
  RVector second_moment() const;

  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }
  void set_closed_form_mean(RVector m) { closed_form_mean_ = std::move(m); }
  const std::optional<RVector>& closed_form_mean() const noexcept { return closed_form_mean_; }

 private:
  SolverKind kind_;
  RVector pi_;
  FixedPointProblem problem_;
  BoundaryVector boundary_;
  std::vector<SeriesDiagnostic> diagnostics_;
  std::vector<std::string> warnings_;
  TruncationPolicy policy_;
  std::optional<RVector> closed_form_mean_;
};

/// Evaluates at s, switching to a circle average when s is within a guard
/// radius of a pre-image of `problem.poles`.
TransformResult evaluate_removable(const FixedPointProblem& problem, Complex s, const TruncationPolicy& policy);
/// Block form of evaluate_removable. Near a pre-image the circle average keeps
/// only the regular part, which is the correct value once the boundary unknowns
/// cancel the pole.
BlockResult iterate_block_removable(const FixedPointProblem& problem, Complex s, const TruncationPolicy& policy);

/// Replaces the unknown columns of an augmented block problem by their values.
///
/// `augmented.V` and `augmented.tail` have K+1 columns: K unknown coefficients
/// followed by the known part.
FixedPointProblem resolve_problem(const FixedPointProblem& augmented, const CVector& unknowns);

struct LinearSolve {
  CVector x;
  double condition_number = 0.0;
  double residual = 0.0;
};
/// LU with partial pivoting; SingularSystem when the condition estimate exceeds 1e12.
LinearSolve solve_linear(const CMatrix& a, const CVector& b);

}  // namespace arq
