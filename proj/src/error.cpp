#include "lipwalk/error.hpp"

namespace lipwalk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidStepSet: return "invalid-step-set";
    case ErrorKind::kInvalidKernel: return "invalid-kernel";
    case ErrorKind::kOutsideDomain: return "outside-domain";
    case ErrorKind::kInvalidRegion: return "invalid-region";
    case ErrorKind::kInvalidProfile: return "invalid-profile";
    case ErrorKind::kIncompleteField: return "incomplete-field";
    case ErrorKind::kConvergenceFailure: return "convergence-failure";
    case ErrorKind::kInvalidTarget: return "invalid-target";
    case ErrorKind::kInvalidSource: return "invalid-source";
    case ErrorKind::kInvalidGeometry: return "invalid-geometry";
    case ErrorKind::kInconclusiveSimulation: return "inconclusive-simulation";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kUnreachableReference: return "unreachable-reference";
    case ErrorKind::kDegenerateCandidate: return "degenerate-candidate";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kInvalidAnchor: return "invalid-anchor";
    case ErrorKind::kOnsetNotFound: return "onset-not-found";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kEmptyGeometry: return "empty-geometry";
    case ErrorKind::kInvalidConfig: return "invalid-config";
    case ErrorKind::kIo: return "io-error";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace lipwalk
