#include "arq/markov_chain.hpp"

#include <cmath>

namespace arq {

std::vector<std::string> MarkovChain::check() const {
  std::vector<std::string> out;
  if (p_.rows() == 0 || p_.rows() != p_.cols()) {
    out.emplace_back("transition matrix must be square and nonempty");
    return out;
  }
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      if (!(p_(i, j) >= 0.0 && p_(i, j) <= 1.0)) {
        out.push_back("transition entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0,1]");
      }
    }
    if (std::abs(p_.row(i).sum() - 1.0) > 1e-12) out.push_back("transition row " + std::to_string(i) + " does not sum to 1");
  }
  return out;
}

bool MarkovChain::irreducible() const {
  const Eigen::Index n = p_.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = (i == j) || p_(i, j) > 0.0;
  // Warshall closure.
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (reach(i, k))
        for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = reach(i, j) || reach(k, j);
  return reach.all();
}

RVector stationary_distribution(const MarkovChain& chain) {
  if (auto v = chain.check(); !v.empty()) throw Error(ErrorCode::NonStochastic, v.front());
  if (!chain.irreducible()) throw Error(ErrorCode::NonIrreducible, "background chain is not irreducible");
  const Eigen::Index n = chain.n_states();
  RMatrix a = chain.transition().transpose() - RMatrix::Identity(n, n);
  a.row(n - 1).setOnes();
  RVector b = RVector::Zero(n);
  b(n - 1) = 1.0;
  RVector pi = a.partialPivLu().solve(b);
  return pi;
}

RMatrix chain_power(const MarkovChain& chain, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidSpec, "chain power needs n >= 0");
  RMatrix result = RMatrix::Identity(chain.n_states(), chain.n_states());
  RMatrix base = chain.transition();
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace arq
