#pragma once

#include <cstdio>
#include <string>

namespace emp {

/// Shortest round-trippable text for a double ("%.17g"), stable across runs.
inline std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace emp
