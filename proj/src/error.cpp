#include "sfw/error.hpp"

namespace sfw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnboundedOrEmpty: return "UnboundedOrEmpty";
    case ErrorCode::EmptyVertexList: return "EmptyVertexList";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::UnknownVertexId: return "UnknownVertexId";
    case ErrorCode::DegeneratePolytope: return "DegeneratePolytope";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonpositiveS: return "NonpositiveS";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::NonpositiveDenominator: return "NonpositiveDenominator";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::EpsGOutOfRange: return "EpsGOutOfRange";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sfw
