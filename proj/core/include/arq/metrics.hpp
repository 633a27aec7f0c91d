#pragma once

#include "arq/model.hpp"

namespace arq {

/// Stationary lag-n autocorrelation of the service sequence S_m, S_{m+n}.
/// Throws DegenerateVariance when the stationary service variance is not positive.
double autocorrelation_service(const ModelSpec& spec, int n);

/// Pearson correlation of a service time with an interarrival time under the
/// stationary chain, for exponential arrivals with independent or FGM dependence.
///
/// next_interarrival pairs S_n with A_{n+1}, the pair the FGM copula couples
/// (states Y_n and Y_{n+1}). same_state pairs a service and interarrival drawn
/// in one state, with the copula applied within that state; this is the
/// pairing behind the reference values for the two-state example.
struct CrossCorrelation {
  double next_interarrival = 0.0;
  double same_state = 0.0;
};
CrossCorrelation cross_correlation(const ModelSpec& spec);

}  // namespace arq
