#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "emp/model.hpp"

namespace emp {

/// sum_edges [log sum e^{-eta C_ij} + (eta/d^2) sum C_ij]
///   + sum_vertices [log sum e^{-eta C_i} + (eta/d) sum C_i]; always >= 0.
double compute_S(const Model& model, double eta);

/// || eta C / d + exp(-eta C) ||_1 over every vertex and edge entry.
double initial_gap_l1_bound(const Model& model, double eta);

/// min(initial_gap_l1_bound, S): bound on the Lyapunov gain still available
/// after initialization.
double compute_S0(const Model& model, double eta);

struct IterationBounds {
  std::uint64_t cyclic = 0;  ///< ceil(4 S0 (deg + 1) / eps^2) sweeps
  std::uint64_t greedy = 0;  ///< ceil(4 S0 / eps^2) greedy steps
};

/// Saturates at UINT64_MAX.
IterationBounds iteration_bounds(double S0, double epsilon, std::size_t max_degree);

/// (2 R1 log(64 R1) + 2 R1 + 2 RH) / delta. Throws NonPositiveDelta.
double eta_threshold_general(double R1, double RH, double delta);

/// (log(8 m n^m d^m) + 2 m n^m d^m) / delta for the order-m relaxation.
double eta_threshold_order_m(std::size_t m, std::size_t n, std::size_t d, double delta);

struct L2Thresholds {
  double eta_min = 0.0;
  double epsilon_max = 0.0;
};

/// eta_min = (2 log(16 n^2 d^2) + 16 |E| d^2) / min(delta, 1/128);
/// epsilon_max = 1 / ((25 d deg |E|)^2 max(eta ||C||_inf, 68)).
L2Thresholds thresholds_L2(std::size_t n, std::size_t d, std::size_t num_edges,
                           std::size_t max_degree, double delta, double cost_inf_norm, double eta);

/// Gap between the best and second-best assignment objectives, by enumeration.
/// This only sees integral vertices, so it is an upper bound on the true gap.
/// Throws TooLarge or ZeroGap (optimum not unique).
double delta_integral_gap(const Model& model);

enum class DeltaSource { integral_cost_lower_bound, user_supplied, oracle_integral_gap };

std::string_view to_string(DeltaSource source) noexcept;

struct BoundsReport {
  double eta = 0.0;
  double epsilon = 0.0;
  double S = 0.0;
  double S0 = 0.0;
  std::uint64_t iteration_bound_cyclic = 0;
  std::uint64_t iteration_bound_greedy = 0;
  double R1 = 0.0;
  double RH = 0.0;
  double eta_threshold_general = 0.0;
  double eta_threshold_order_m = 0.0;
  double eta_threshold_L2 = 0.0;
  double epsilon_threshold_L2 = 0.0;
  double delta_used = 0.0;
  DeltaSource delta_source = DeltaSource::integral_cost_lower_bound;
};

/// Gathers every bound for one model. With no user delta and no oracle request
/// the integral-cost lower bound 1/2 is used.
BoundsReport make_bounds_report(const Model& model, double eta, double epsilon,
                                std::optional<double> user_delta = std::nullopt,
                                bool oracle_delta = false);

nlohmann::json to_json(const BoundsReport& report);

}  // namespace emp
