#pragma once

// Liouville-type boundary resolution shared by the two-sided and transient solvers.
//
// Z_j(s) = sum_i H_ji(s) Z_i(shift(s)) + f_j(s) + poly_j(s) / D_j(s), where D_j is the
// monic polynomial with the right-half-plane poles of row j and poly_j(s) = sum_{l>=1} c_lj s^l.
// At every zero sigma of D_j (multiplicity m) the cleared row
//   Phi_j(s) = sum_i [D_j H_ji](s) Z_i(shift(s)) + poly_j(s)
// vanishes to order m, which fixes the coefficients c_lj.

#include <functional>
#include <vector>

#include "arq/polynomial.hpp"
#include "arq/solution.hpp"

namespace arq::detail {

struct BoundarySetup {
  MatrixFunction H;
  /// Known N x 1 part of the right-hand side; empty means zero.
  MatrixFunction forcing;
  /// Limit vector of the infinite product; empty drops the product term.
  CVector tail;
  ShiftMap shift = ShiftMap::scale(0.5);
  std::vector<Complex> kernel_poles;
  /// Zeros of D_j per row, repeated by multiplicity.
  std::vector<std::vector<Complex>> roots;
  /// 1 x N row of D_j(s) H_j.(s), analytic at the zeros of D_j.
  std::function<MatrixJet(const Jet&, Eigen::Index)> cleared_row;
};

struct BoundaryResult {
  FixedPointProblem problem;
  CVector coefficients;
  /// coefficients[offsets[j] + l - 1] is c_lj.
  std::vector<Eigen::Index> offsets;
  double condition_number = 0.0;
  double residual = 0.0;
  /// D_j(0) (Z_j(0) - f_j(0)) - [D_j H_j.](0) Z(0): the constant term the polynomial omits.
  CVector constant_terms;
  std::vector<SeriesDiagnostic> diagnostics;
};

BoundaryResult solve_boundary(const BoundarySetup& setup, const TruncationPolicy& policy);

/// Rational kernel entry num / (lead prod (s - r)), poles split by half plane.
struct FactoredEntry {
  Polynomial num;
  Complex lead{1.0};
  std::vector<Complex> right;
  std::vector<Complex> left;

  Jet value(const Jet& s) const;
  /// num(s) prod_{row_roots \ right}(s - r) / (lead prod_left (s - r)).
  Jet cleared(const Jet& s, const std::vector<Complex>& row_roots) const;
};

/// Factors a rational function; right-half-plane zeros are snapped onto `anchors`
/// (shared across entries) so that equal poles compare exactly.
FactoredEntry factor_entry(const RationalLST& r, std::vector<Complex>& anchors);

}  // namespace arq::detail
