#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace emp {

/// log(sum(exp(values[k * stride]))) over `count` entries, shifted by the max
/// so that exponents never overflow. Returns -inf for an empty or all -inf input.
inline double log_sum_exp(const double* values, std::size_t count, std::size_t stride = 1) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) top = std::max(top, values[k * stride]);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) acc += std::exp(values[k * stride] - top);
  return top + std::log(acc);
}

inline double log_sum_exp(std::span<const double> values) {
  return log_sum_exp(values.data(), values.size());
}

}  // namespace emp
