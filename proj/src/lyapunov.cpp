#include "emp/lyapunov.hpp"

#include <cmath>
#include <vector>

#include "emp/log_math.hpp"

namespace emp {

LyapunovTerm lyapunov_edge_term(const Model& model, double eta, const DualState& dual,
                                std::size_t e) {
  const std::size_t d = model.topology.num_labels();
  const auto lrow = dual.row_multiplier(e);
  const auto lcol = dual.col_multiplier(e);
  const double xi = dual.xi_edge[e];

  std::vector<double> exponents(d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      exponents[a * d + b] = -eta * model.costs.at(e, a, b) - lrow[a] - lcol[b] - xi;
  return {std::exp(log_sum_exp(exponents)), xi};
}

LyapunovTerm lyapunov_vertex_term(const Model& model, double eta, const DualState& dual,
                                  std::size_t v) {
  const auto& g = model.topology;
  const std::size_t d = g.num_labels();
  const double xi = dual.xi_vertex[v];

  std::vector<double> exponents(d);
  for (std::size_t a = 0; a < d; ++a) exponents[a] = -eta * model.costs.vertex(v)[a] - xi;
  for (const auto& [e, side] : g.incident(v)) {
    const auto multiplier = side == Side::row ? dual.row_multiplier(e) : dual.col_multiplier(e);
    for (std::size_t a = 0; a < d; ++a) exponents[a] += multiplier[a];
  }
  return {std::exp(log_sum_exp(exponents)), xi};
}

double lyapunov_constant(const Model& model, double eta) {
  std::vector<double> exponents;
  exponents.reserve(model.costs.vertex_values().size() + model.costs.edge_values().size());
  for (double c : model.costs.vertex_values()) exponents.push_back(-eta * c);
  for (double c : model.costs.edge_values()) exponents.push_back(-eta * c);
  return std::exp(log_sum_exp(exponents));
}

LyapunovValue evaluate_lyapunov(const Model& model, double eta, const DualState& dual) {
  const auto& g = model.topology;
  LyapunovValue out;
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    out.variable += lyapunov_edge_term(model, eta, dual, e).value();
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    out.variable += lyapunov_vertex_term(model, eta, dual, v).value();
  out.constant = lyapunov_constant(model, eta);
  return out;
}

double lyapunov(const Model& model, double eta, const DualState& dual) {
  return evaluate_lyapunov(model, eta, dual).total();
}

}  // namespace emp
