#include "emp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emp/error.hpp"
#include "emp/log_math.hpp"

namespace emp {

GraphTopology::GraphTopology(std::size_t num_vertices, std::size_t num_labels,
                             std::vector<Edge> edges)
    : num_vertices_(num_vertices), num_labels_(num_labels), edges_(std::move(edges)) {
  std::vector<std::size_t> degree(num_vertices_, 0);
  for (const auto& [i, j] : edges_) {
    if (i >= num_vertices_ || j >= num_vertices_)
      throw Error(ErrorKind::dimension_mismatch,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range for " +
                      std::to_string(num_vertices_) + " vertices");
    ++degree[i];
    if (j != i) ++degree[j];
  }

  offsets_.assign(num_vertices_ + 1, 0);
  for (std::size_t v = 0; v < num_vertices_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  max_degree_ = num_vertices_ == 0 ? 0 : *std::max_element(degree.begin(), degree.end());

  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    incidence_[fill[i]++] = {e, Side::row};
    if (j != i) incidence_[fill[j]++] = {e, Side::col};
  }
}

void validate_model(const GraphTopology& g, const PotentialVector& costs) {
  const std::size_t n = g.num_vertices();
  const std::size_t d = g.num_labels();
  if (n < 2) throw Error(ErrorKind::dimension_mismatch, "need at least 2 vertices");
  if (d < 2) throw Error(ErrorKind::dimension_mismatch, "need at least 2 labels");
  if (costs.num_vertices() != n || costs.num_labels() != d ||
      costs.num_edges() != g.num_edges() || costs.vertex_values().size() != n * d ||
      costs.edge_values().size() != g.num_edges() * d * d)
    throw Error(ErrorKind::dimension_mismatch, "cost vector does not match the topology");

  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i >= j)
      throw Error(ErrorKind::non_canonical_edge,
                  "edge " + std::to_string(e) + " = (" + std::to_string(i) + "," +
                      std::to_string(j) + ") must satisfy i < j");
    if (e > 0) {
      if (edges[e - 1] == edges[e])
        throw Error(ErrorKind::duplicate_edge, "edge (" + std::to_string(i) + "," +
                                                   std::to_string(j) + ") listed twice");
      if (edges[e] < edges[e - 1])
        throw Error(ErrorKind::non_canonical_edge,
                    "edge list is not in lexicographic order at index " + std::to_string(e));
    }
  }

  for (std::size_t v = 0; v < n; ++v)
    if (g.degree(v) == 0)
      throw Error(ErrorKind::isolated_vertex, "vertex " + std::to_string(v) + " has no edges");

  const auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(costs.vertex_values().begin(), costs.vertex_values().end(), finite) ||
      !std::all_of(costs.edge_values().begin(), costs.edge_values().end(), finite))
    throw Error(ErrorKind::non_finite_cost, "cost vector has a non-finite entry");
}

EdgeViolation edge_violations(const GraphTopology& g, const MarginalVector& gamma,
                              std::size_t edge) {
  const std::size_t d = g.num_labels();
  const auto [i, j] = g.edge(edge);
  const double* block = gamma.edge(edge).data();
  const auto gi = gamma.vertex(i);
  const auto gj = gamma.vertex(j);

  EdgeViolation out;
  for (std::size_t x = 0; x < d; ++x) {
    out.row_l1 += std::abs(std::exp(log_sum_exp(block + x * d, d)) - std::exp(gi[x]));
    out.col_l1 += std::abs(std::exp(log_sum_exp(block + x, d, d)) - std::exp(gj[x]));
  }
  return out;
}

Violation max_violation(const GraphTopology& g, const MarginalVector& gamma) {
  Violation best;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto v = edge_violations(g, gamma, e);
    if (v.row_l1 > best.value) best = {e, Side::row, v.row_l1};
    if (v.col_l1 > best.value) best = {e, Side::col, v.col_l1};
  }
  return best;
}

SlackVector compute_slack(const GraphTopology& g, const MarginalVector& gamma) {
  const std::size_t d = g.num_labels();
  SlackVector slack{d, std::vector<double>(g.num_edges() * d), std::vector<double>(g.num_edges() * d)};
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    const double* block = gamma.edge(e).data();
    for (std::size_t x = 0; x < d; ++x) {
      slack.row[e * d + x] = std::exp(log_sum_exp(block + x * d, d)) - std::exp(gamma.vertex(i)[x]);
      slack.col[e * d + x] = std::exp(log_sum_exp(block + x, d, d)) - std::exp(gamma.vertex(j)[x]);
    }
  }
  return slack;
}

double assignment_cost(const Model& model, const Assignment& assignment) {
  const auto& g = model.topology;
  if (assignment.labels.size() != g.num_vertices())
    throw Error(ErrorKind::dimension_mismatch, "assignment length differs from vertex count");
  double total = 0.0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    total += model.costs.vertex(v)[assignment.labels[v]];
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    total += model.costs.at(e, assignment.labels[i], assignment.labels[j]);
  }
  return total;
}

}  // namespace emp
