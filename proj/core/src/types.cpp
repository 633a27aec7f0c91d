#include "arq/types.hpp"

namespace arq {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PoleOnOrbit: return "PoleOnOrbit";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonIrreducible: return "NonIrreducible";
    case ErrorCode::NonStochastic: return "NonStochastic";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::RootFindingFailure: return "RootFindingFailure";
    case ErrorCode::AmbiguousRoot: return "AmbiguousRoot";
    case ErrorCode::UnsupportedSampling: return "UnsupportedSampling";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace arq
