#include "emp/error.hpp"

namespace emp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::isolated_vertex: return "IsolatedVertex";
    case ErrorKind::non_finite_cost: return "NonFiniteCost";
    case ErrorKind::duplicate_edge: return "DuplicateEdge";
    case ErrorKind::non_canonical_edge: return "NonCanonicalEdge";
    case ErrorKind::zero_mass: return "ZeroMass";
    case ErrorKind::non_positive_delta: return "NonPositiveDelta";
    case ErrorKind::non_positive_input: return "NonPositiveInput";
    case ErrorKind::too_large: return "TooLarge";
    case ErrorKind::zero_gap: return "ZeroGap";
    case ErrorKind::unrepairable: return "Unrepairable";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

}  // namespace emp
