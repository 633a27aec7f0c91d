#pragma once

#include <string>
#include <vector>

#include "arq/types.hpp"

namespace arq {

/// Discrete-time background chain given by its one-step transition matrix.
class MarkovChain {
 public:
  MarkovChain() = default;
  explicit MarkovChain(RMatrix transition) : p_(std::move(transition)) {}

  Eigen::Index n_states() const noexcept { return p_.rows(); }
  const RMatrix& transition() const noexcept { return p_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return p_(i, j); }

  /// Stochasticity violations (square, entries in [0,1], rows sum to 1 within 1e-12).
  std::vector<std::string> check() const;
  bool stochastic() const { return check().empty(); }
  /// Boolean reachability closure on the support graph is complete.
  bool irreducible() const;

 private:
  RMatrix p_;
};

/// Solves pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
/// Throws NonStochastic or NonIrreducible.
RVector stationary_distribution(const MarkovChain& chain);

/// P^n by repeated squaring.
RMatrix chain_power(const MarkovChain& chain, int n);

}  // namespace arq
