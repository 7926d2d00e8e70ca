#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfw {

enum class ErrorCode {
  DimensionMismatch,
  UnboundedOrEmpty,
  EmptyVertexList,
  Infeasible,
  Unbounded,
  InfeasiblePoint,
  UnknownVertexId,
  DegeneratePolytope,
  NoConvergence,
  NonpositiveS,
  MissingParam,
  NonpositiveDenominator,
  DegenerateDirection,
  EpsGOutOfRange,
  MalformedTrace,
  DegenerateFit,
  ConfigError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; the
// code lets callers (and the CLI's exit-code mapping) branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfw
