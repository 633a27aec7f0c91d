#pragma once

#include <string>
#include <vector>

#include "arq/distribution.hpp"
#include "arq/model.hpp"
#include "arq/solution.hpp"

namespace arq {

/// Arrivals driven by a continuous-time background chain.
///
/// In state i customers arrive at Poisson rate rates[i]; the chain starts from
/// `initial` and the first customer finds workload w.
struct ModulatedArrivalSpec {
  RMatrix generator;
  std::vector<double> rates;
  RVector initial;
  double w = 0.0;

  Eigen::Index n_states() const { return generator.rows(); }
};
std::vector<std::string> validate(const ModulatedArrivalSpec& spec);

/// Transform arguments: r weights the customer index, s the workload, eta the arrival epoch.
struct TransientQuery {
  Complex r;
  Complex s;
  Complex eta;
};

/// Spectrum of Lambda - Q^T; mu = nu + eta are the zeros of det M^T(eta - s) in s.
struct EigenData {
  CVector nu;
  CVector mu;
  CMatrix right;
};
/// Throws DegenerateSpectrum when two eigenvalues are within 1e-8 or one has Re <= 0.
EigenData eigen_mu(const ModulatedArrivalSpec& spec, Complex eta);

struct TransientResult {
  CVector value;
  SeriesCounts terms_used;
  double residual = 0.0;
  /// coefficients(l - 1, j) multiplies s^l in row j.
  CMatrix coefficients;
  double condition_number = 0.0;
  double boundary_residual = 0.0;
  /// Constant polynomial term recomputed from Z(0); should vanish.
  CVector constant_terms;
  std::vector<SeriesDiagnostic> diagnostics;
};

/// Transient transform sum_n r^n E[exp(-s W_n - eta T_n) 1{Y_n = j}] for
/// W_{n+1} = [a W_n + S_n - A_{n+1}]^+ with Markov-modulated Poisson arrivals.
///
/// The spectrum of Lambda - Q^T is computed once per solver and shared by all queries.
class TransientSolver {
 public:
  TransientSolver(ModulatedArrivalSpec spec, std::vector<Distribution> services, double a,
                  TruncationPolicy policy = TruncationPolicy::from_environment());

  const CVector& nu() const noexcept { return eigen_.nu; }
  const ModulatedArrivalSpec& spec() const noexcept { return spec_; }
  TransientResult solve(const TransientQuery& query) const;

 private:
  ModulatedArrivalSpec spec_;
  std::vector<Distribution> services_;
  double a_;
  TruncationPolicy policy_;
  EigenData eigen_;
};

TransientResult solve_transient(const ModulatedArrivalSpec& spec, const std::vector<Distribution>& services, double a,
                                const TransientQuery& query,
                                const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Variant in which the interarrival depends on the preceding service length t
/// through E[exp(-s A) 1{next = j} | current i, S = t] = chi_ij(s) exp(-psi_i(s) t).
TransientResult solve_transient_service_linked(const ServiceLinkedDependence& dependence, const RVector& initial,
                                               double w, const std::vector<Distribution>& services, double a,
                                               const TransientQuery& query,
                                               const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Classical adjugate, adj(A) A = det(A) I, by cofactor expansion.
CMatrix adjugate(const CMatrix& m);
Complex determinant(const CMatrix& m);

}  // namespace arq
