#pragma once

// Shared helpers for the test binaries. Everything here is written against
// the plain definitions (linear space, no log-sum-exp) so it can serve as an
// independent reference for the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "emp/model.hpp"
#include "emp/projections.hpp"

namespace emp::test {

inline Model single_edge_model(std::size_t d, std::vector<double> edge_costs = {},
                               std::vector<double> ci = {}, std::vector<double> cj = {}) {
  GraphTopology g(2, d, {{0, 1}});
  PotentialVector c(g);
  if (!edge_costs.empty()) std::copy(edge_costs.begin(), edge_costs.end(), c.edge(0).begin());
  if (!ci.empty()) std::copy(ci.begin(), ci.end(), c.vertex(0).begin());
  if (!cj.empty()) std::copy(cj.begin(), cj.end(), c.vertex(1).begin());
  return Model{std::move(g), std::move(c)};
}

/// Stores linear-space values as logs.
inline void set_edge(MarginalVector& gamma, std::size_t e, const std::vector<double>& linear) {
  for (std::size_t k = 0; k < linear.size(); ++k) gamma.edge(e)[k] = std::log(linear[k]);
}
inline void set_vertex(MarginalVector& gamma, std::size_t v, const std::vector<double>& linear) {
  for (std::size_t k = 0; k < linear.size(); ++k) gamma.vertex(v)[k] = std::log(linear[k]);
}

inline std::vector<double> linear_edge(const MarginalVector& gamma, std::size_t e) {
  std::vector<double> out;
  for (double v : gamma.edge(e)) out.push_back(std::exp(v));
  return out;
}
inline std::vector<double> linear_vertex(const MarginalVector& gamma, std::size_t v) {
  std::vector<double> out;
  for (double x : gamma.vertex(v)) out.push_back(std::exp(x));
  return out;
}

/// Direct transcription of the Lyapunov function with plain exp. Only valid
/// when nothing overflows (small eta, modest duals).
inline double naive_lyapunov(const Model& model, double eta, const DualState& dual) {
  const auto& g = model.topology;
  const std::size_t d = g.num_labels();
  double L = 0.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const double c = model.costs.at(e, a, b);
        L -= std::exp(-eta * c - dual.lambda_row[e * d + a] - dual.lambda_col[e * d + b] - dual.xi_edge[e]);
        L += std::exp(-eta * c);
      }
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    for (std::size_t a = 0; a < d; ++a) {
      double s = -eta * model.costs.vertex(v)[a] - dual.xi_vertex[v];
      for (const auto& [e, side] : g.incident(v))
        s += side == Side::row ? dual.lambda_row[e * d + a] : dual.lambda_col[e * d + a];
      L -= std::exp(s);
      L += std::exp(-eta * model.costs.vertex(v)[a]);
    }
  for (double x : dual.xi_edge) L -= x;
  for (double x : dual.xi_vertex) L -= x;
  return L;
}

inline double naive_hellinger_sq(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (std::sqrt(p[k]) - std::sqrt(q[k])) * (std::sqrt(p[k]) - std::sqrt(q[k]));
  return s / 2.0;
}

/// Random positive log-marginals, entries in [e^-2, e^1].
inline void randomize(MarginalVector& gamma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  for (auto& v : gamma.vertex_values()) v = u(rng);
  for (auto& v : gamma.edge_values()) v = u(rng);
}

inline std::vector<double> random_simplex(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> p(d);
  double total = 0.0;
  for (auto& x : p) total += (x = u(rng));
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace emp::test
