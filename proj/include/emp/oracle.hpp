#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "emp/model.hpp"

namespace emp {

/// Enumeration refuses models with more than this many assignments.
inline constexpr double kMaxEnumeration = 1e8;

// Objective values are theta = -C summed over vertices and edges, so `best` is
// a maximizer. `second_value` is the runner-up over all other assignments and
// equals `best_value` when the optimum is shared.
struct OracleResult {
  Assignment best;
  double best_value = 0.0;
  double second_value = 0.0;
  bool unique = false;
  std::size_t count_optimal = 0;
};

/// Exhaustive MAP. Throws ErrorKind::too_large when d^n exceeds kMaxEnumeration.
OracleResult brute_force_map(const Model& model);

/// <theta, Gamma> for the 0/1 marginal vector that encodes `assignment`.
double integral_lp_objective(const Model& model, const Assignment& assignment);

struct KlProjection {
  std::vector<double> edge;    ///< projected d x d joint, row-major
  std::vector<double> vertex;  ///< projected vertex marginal
  std::vector<double> alpha;   ///< per-coordinate dual step
};

/// Projects (edge, vertex) onto {row sums == vertex} (or column sums for
/// Side::col) by minimizing the 1-D dual s e^{-a} + p e^{a} per coordinate with
/// golden-section search on [-50, 50]. Inputs are linear-space and must be
/// strictly positive.
KlProjection kl_projection_oracle(std::span<const double> gamma_edge,
                                  std::span<const double> gamma_vertex, Side side);

/// Golden-section search driven by a comparison: lower(a, b) is true when
/// f(a) < f(b). Returns the midpoint once the bracket is narrower than `tol`.
double golden_section_search(const std::function<bool(double, double)>& lower, double lo, double hi,
                             double tol);

/// Minimizer of a unimodal function on [lo, hi], bracket shrunk below `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol);

}  // namespace emp
