#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lipwalk {

// Every failure mode a caller may want to branch on gets its own kind.
enum class ErrorKind {
  kInvalidStepSet,
  kInvalidKernel,
  kOutsideDomain,
  kInvalidRegion,
  kInvalidProfile,
  kIncompleteField,
  kConvergenceFailure,
  kInvalidTarget,
  kInvalidSource,
  kInvalidGeometry,
  kInconclusiveSimulation,
  kNonConvergence,
  kUnreachableReference,
  kDegenerateCandidate,
  kDegenerate,
  kInvalidAnchor,
  kOnsetNotFound,
  kInsufficientData,
  kEmptyGeometry,
  kInvalidConfig,
  kIo,
  kInvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace lipwalk
