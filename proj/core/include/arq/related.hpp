#pragma once

#include "arq/model.hpp"
#include "arq/solution.hpp"

namespace arq {

/// Modulated D/G/1 shot-noise queue.
///
/// Needs a ShotNoiseKind spec with deterministic arrivals. The boundary unknowns
/// r_j = sum_i p_ij beta*_i(nu_j k) Z_i(nu_j k), k = exp(-r t), are fixed by
/// evaluating the series at s = nu_j k.
StationarySolution solve_shotnoise(const ModelSpec& spec,
                                   const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Queue whose service requirement [S - cW]^+ shrinks with the waiting time.
///
/// Needs a WaitDependentKind spec with exponential arrivals and common
/// exponential services of rate mu.
StationarySolution solve_waitdep(const ModelSpec& spec,
                                 const TruncationPolicy& policy = TruncationPolicy::from_environment());

/// Eigen-decomposition of Lambda (I - P^T) used by the wait-dependent solver.
struct WaitDepSpectrum {
  CVector gamma;  ///< gamma(0) = 0, Re gamma(i) > 0 otherwise
  CMatrix right;  ///< columns are right eigenvectors
  CMatrix left;   ///< rows are left eigenvectors, max-abs normalised, left.row(0) * pi > 0
};
WaitDepSpectrum waitdep_spectrum(const ModelSpec& spec);

}  // namespace arq
