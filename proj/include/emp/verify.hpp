#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "emp/model.hpp"

namespace emp {

/// Mixed battery: grids of side 2-4 and Erdos-Renyi graphs with n <= 30,
/// d in {2, 3}, Potts costs. Deterministic in `seed`.
std::vector<Model> default_battery(std::uint64_t seed, std::size_t count);

/// `count` seeded 2 x 2 grids with d = 2.
std::vector<Model> small_grid_battery(std::uint64_t seed, std::size_t count);

struct VerifyOptions {
  std::vector<Model> models;
  std::vector<double> eta_values{1.0, 5.0};
  std::vector<double> epsilons{1e-1, 1e-2};
  std::size_t oracle_pairs = 1000;
  std::size_t round_trip_steps = 10000;
  std::uint64_t seed = 0;
  /// Negate the consistency step in every solver run (mutation check).
  bool inject_fault = false;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  ///< worst observed residual or margin, see detail
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  std::size_t runs = 0;

  bool passed() const;
  const PropertyResult* find(const std::string& name) const;
};

VerifyReport run_verify(const VerifyOptions& options);

std::string to_text(const VerifyReport& report);
nlohmann::json to_json(const VerifyReport& report);

}  // namespace emp
