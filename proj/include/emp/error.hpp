#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emp {

enum class ErrorKind {
  dimension_mismatch,
  isolated_vertex,
  non_finite_cost,
  duplicate_edge,
  non_canonical_edge,
  zero_mass,
  non_positive_delta,
  non_positive_input,
  too_large,
  zero_gap,
  unrepairable,
  invalid_argument,
  parse,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace emp
