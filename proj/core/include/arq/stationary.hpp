#pragma once

#include <vector>

#include "arq/model.hpp"
#include "arq/solution.hpp"

namespace arq {

/// Exponential interarrivals, conditionally independent services.
StationarySolution solve_exponential(const ModelSpec& spec,
                                     const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Closed-form E[W 1{Y=i}] of an exponential-arrival solution.
RVector mean_workload(const StationarySolution& solution);

/// Mixed-Erlang interarrivals; the unknowns are derivatives of Z at a * lambda_j.
StationarySolution solve_mixed_erlang(const ModelSpec& spec,
                                      const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Exponential interarrivals coupled to the preceding service by an FGM copula.
StationarySolution solve_fgm(const ModelSpec& spec, const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Rational two-sided transform of S - A per state pair.
StationarySolution solve_bme(const ModelSpec& spec, const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Picks the solver from the arrival family, dependence and model kind.
StationarySolution solve_stationary(const ModelSpec& spec,
                                    const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Per-series truncation counts of the FGM/exponential boundary assembly.
///
/// For point index n in {0,1} (arguments a lambda_j and 2 a lambda_j) and kernel
/// m in {0,1} (rates lambda and 2 lambda) the additive count is the number of
/// terms kept before two consecutive summands differ by less than the tolerance;
/// the product count is the number of factors kept before two consecutive
/// partial products do.
struct ProductFormCounts {
  Eigen::Index n_states = 0;
  std::vector<int> sums;      ///< index (n * 2 + m) * N + j
  std::vector<int> products;  ///< index j * 2 + n

  int sum(int m, Eigen::Index j, int n) const { return sums[static_cast<std::size_t>((n * 2 + m) * n_states + j)]; }
  int product(Eigen::Index j, int n) const { return products[static_cast<std::size_t>(j * 2 + n)]; }
};
ProductFormCounts product_form_counts(const ModelSpec& spec,
                                      const TruncationPolicy& policy = TruncationPolicy::from_environment());

}  // namespace arq
