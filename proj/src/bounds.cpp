#include "emp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "emp/error.hpp"
#include "emp/log_math.hpp"
#include "emp/oracle.hpp"

namespace emp {

namespace {

double block_term(std::span<const double> costs, double eta, double mean_weight) {
  std::vector<double> exponents(costs.size());
  double linear = 0.0;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    exponents[k] = -eta * costs[k];
    linear += costs[k];
  }
  return log_sum_exp(exponents) + eta * mean_weight * linear;
}

std::uint64_t saturating_ceil(double x) {
  if (!(x < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace

double compute_S(const Model& model, double eta) {
  const auto& g = model.topology;
  const double d = static_cast<double>(g.num_labels());
  double total = 0.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) total += block_term(model.costs.edge(e), eta, 1.0 / (d * d));
  for (std::size_t v = 0; v < g.num_vertices(); ++v) total += block_term(model.costs.vertex(v), eta, 1.0 / d);
  return total;
}

double initial_gap_l1_bound(const Model& model, double eta) {
  const double d = static_cast<double>(model.topology.num_labels());
  double total = 0.0;
  for (const auto* values : {&model.costs.vertex_values(), &model.costs.edge_values()})
    for (double c : *values) total += std::abs(eta * c / d + std::exp(-eta * c));
  return total;
}

double compute_S0(const Model& model, double eta) {
  return std::min(initial_gap_l1_bound(model, eta), compute_S(model, eta));
}

IterationBounds iteration_bounds(double S0, double epsilon, std::size_t max_degree) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  if (S0 < 0.0) throw Error(ErrorKind::invalid_argument, "S0 must be nonnegative");
  const double eps2 = epsilon * epsilon;
  return {saturating_ceil(4.0 * S0 * static_cast<double>(max_degree + 1) / eps2),
          saturating_ceil(4.0 * S0 / eps2)};
}

double eta_threshold_general(double R1, double RH, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::non_positive_delta, "delta must be positive");
  if (!(R1 > 0.0)) throw Error(ErrorKind::invalid_argument, "R1 must be positive");
  return (2.0 * R1 * std::log(64.0 * R1) + 2.0 * R1 + 2.0 * RH) / delta;
}

double eta_threshold_order_m(std::size_t m, std::size_t n, std::size_t d, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::non_positive_delta, "delta must be positive");
  const double md = static_cast<double>(m);
  const double volume = std::pow(static_cast<double>(n), md) * std::pow(static_cast<double>(d), md);
  return (std::log(8.0 * md * volume) + 2.0 * md * volume) / delta;
}

L2Thresholds thresholds_L2(std::size_t n, std::size_t d, std::size_t num_edges,
                           std::size_t max_degree, double delta, double cost_inf_norm, double eta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::non_positive_delta, "delta must be positive");
  const double nd = static_cast<double>(n) * static_cast<double>(d);
  const double dd = static_cast<double>(d) * static_cast<double>(d);
  L2Thresholds out;
  out.eta_min = (2.0 * std::log(16.0 * nd * nd) + 16.0 * static_cast<double>(num_edges) * dd) /
                std::min(delta, 1.0 / 128.0);
  const double width = 25.0 * static_cast<double>(d) * static_cast<double>(max_degree) *
                       static_cast<double>(num_edges);
  out.epsilon_max = 1.0 / (width * width * std::max(eta * cost_inf_norm, 68.0));
  return out;
}

double delta_integral_gap(const Model& model) {
  const auto result = brute_force_map(model);
  if (!result.unique)
    throw Error(ErrorKind::zero_gap, "optimal assignment is not unique (" +
                                         std::to_string(result.count_optimal) + " ties)");
  return result.best_value - result.second_value;
}

std::string_view to_string(DeltaSource source) noexcept {
  switch (source) {
    case DeltaSource::integral_cost_lower_bound: return "integral_cost_lower_bound";
    case DeltaSource::user_supplied: return "user_supplied";
    case DeltaSource::oracle_integral_gap: return "oracle_integral_gap";
  }
  return "unknown";
}

BoundsReport make_bounds_report(const Model& model, double eta, double epsilon,
                                std::optional<double> user_delta, bool oracle_delta) {
  const auto& g = model.topology;
  const std::size_t n = g.num_vertices();
  const std::size_t d = g.num_labels();
  const std::size_t m = g.num_edges();
  const double dd = static_cast<double>(d);

  BoundsReport r;
  r.eta = eta;
  r.epsilon = epsilon;
  r.S = compute_S(model, eta);
  r.S0 = std::min(initial_gap_l1_bound(model, eta), r.S);
  const auto iters = iteration_bounds(r.S0, epsilon, g.max_degree());
  r.iteration_bound_cyclic = iters.cyclic;
  r.iteration_bound_greedy = iters.greedy;

  if (user_delta) {
    r.delta_used = *user_delta;
    r.delta_source = DeltaSource::user_supplied;
  } else if (oracle_delta) {
    r.delta_used = delta_integral_gap(model);
    r.delta_source = DeltaSource::oracle_integral_gap;
  } else {
    r.delta_used = 0.5;
    r.delta_source = DeltaSource::integral_cost_lower_bound;
  }

  // Entry counts of the vertex and edge blocks stand in for the binomial sums
  // of the general order-m bound, with |E| in place of C(n, 2).
  r.R1 = static_cast<double>(n) * dd + static_cast<double>(m) * dd * dd;
  r.RH = static_cast<double>(n) * std::log(dd) + static_cast<double>(m) * std::log(dd * dd);
  r.eta_threshold_general = eta_threshold_general(r.R1, r.RH, r.delta_used);
  r.eta_threshold_order_m = eta_threshold_order_m(2, n, d, r.delta_used);

  double inf_norm = 0.0;
  for (const auto* values : {&model.costs.vertex_values(), &model.costs.edge_values()})
    for (double c : *values) inf_norm = std::max(inf_norm, std::abs(c));
  const auto l2 = thresholds_L2(n, d, m, g.max_degree(), r.delta_used, inf_norm, eta);
  r.eta_threshold_L2 = l2.eta_min;
  r.epsilon_threshold_L2 = l2.epsilon_max;
  return r;
}

nlohmann::json to_json(const BoundsReport& r) {
  return {
      {"eta", r.eta},
      {"epsilon", r.epsilon},
      {"S", r.S},
      {"S0", r.S0},
      {"iteration_bound_cyclic", r.iteration_bound_cyclic},
      {"iteration_bound_greedy", r.iteration_bound_greedy},
      {"R1", r.R1},
      {"RH", r.RH},
      {"R1_formula", "n*d + |E|*d^2"},
      {"RH_formula", "n*log(d) + |E|*log(d^2)"},
      {"eta_threshold_general", r.eta_threshold_general},
      {"eta_threshold_order_m", r.eta_threshold_order_m},
      {"eta_threshold_L2", r.eta_threshold_L2},
      {"epsilon_threshold_L2", r.epsilon_threshold_L2},
      {"delta_used", r.delta_used},
      {"delta_source", std::string(to_string(r.delta_source))},
  };
}

}  // namespace emp
