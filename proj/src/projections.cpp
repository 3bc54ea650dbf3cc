#include "emp/projections.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emp/error.hpp"
#include "emp/log_math.hpp"

namespace emp {

DualState DualState::zeros(const GraphTopology& g) {
  const std::size_t d = g.num_labels();
  DualState s;
  s.num_labels = d;
  s.lambda_row.assign(g.num_edges() * d, 0.0);
  s.lambda_col.assign(g.num_edges() * d, 0.0);
  s.xi_edge.assign(g.num_edges(), 0.0);
  s.xi_vertex.assign(g.num_vertices(), 0.0);
  s.zeta = DualSums(g);
  return s;
}

std::string_view to_string(ProjectionKind kind) noexcept {
  switch (kind) {
    case ProjectionKind::left_consistency: return "left_cons";
    case ProjectionKind::left_normalization: return "left_norm";
    case ProjectionKind::right_consistency: return "right_cons";
    case ProjectionKind::right_normalization: return "right_norm";
  }
  return "unknown";
}

std::size_t projected_vertex(const GraphTopology& g, std::size_t edge, ProjectionKind kind) {
  const bool left = kind == ProjectionKind::left_consistency ||
                    kind == ProjectionKind::left_normalization;
  return left ? g.edge(edge).i : g.edge(edge).j;
}

namespace {

void require_mass(double log_mass, std::size_t edge, const char* what) {
  if (!std::isfinite(log_mass))
    throw Error(ErrorKind::zero_mass,
                std::string(what) + " on edge " + std::to_string(edge) + " has zero or invalid mass");
}

void normalize(MarginalVector& gamma, DualState& dual, std::size_t edge, std::size_t vertex) {
  auto block = gamma.edge(edge);
  auto marginal = gamma.vertex(vertex);
  const double log_edge_mass = log_sum_exp(block);
  const double log_vertex_mass = log_sum_exp(marginal);
  require_mass(log_edge_mass, edge, "joint");
  require_mass(log_vertex_mass, edge, "vertex marginal");

  for (auto& v : block) v -= log_edge_mass;
  for (auto& v : dual.zeta.edge(edge)) v -= log_edge_mass;
  dual.xi_edge[edge] += log_edge_mass;

  for (auto& v : marginal) v -= log_vertex_mass;
  for (auto& v : dual.zeta.vertex(vertex)) v -= log_vertex_mass;
  dual.xi_vertex[vertex] += log_vertex_mass;
}

}  // namespace

namespace detail {

void apply_consistency(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                       std::size_t edge, Side side, bool flip_sign) {
  const std::size_t d = g.num_labels();
  const auto [i, j] = g.edge(edge);
  const std::size_t vertex = side == Side::row ? i : j;
  // Row x of the block lives at stride 1 from x*d; column x at stride d from x.
  const std::size_t stride = side == Side::row ? 1 : d;
  const auto offset = [&](std::size_t x) { return side == Side::row ? x * d : x; };

  double* block = gamma.edge(edge).data();
  double* zeta_block = dual.zeta.edge(edge).data();
  auto marginal = gamma.vertex(vertex);
  auto zeta_marginal = dual.zeta.vertex(vertex);
  auto multiplier = side == Side::row ? dual.row_multiplier(edge) : dual.col_multiplier(edge);

  for (std::size_t x = 0; x < d; ++x) {
    const double log_sum = log_sum_exp(block + offset(x), d, stride);
    require_mass(log_sum, edge, "joint slice");
    require_mass(marginal[x], edge, "vertex marginal");
    double alpha = 0.5 * (log_sum - marginal[x]);
    if (flip_sign) alpha = -alpha;

    for (std::size_t y = 0; y < d; ++y) {
      block[offset(x) + y * stride] -= alpha;
      zeta_block[offset(x) + y * stride] -= alpha;
    }
    marginal[x] += alpha;
    zeta_marginal[x] += alpha;
    multiplier[x] += alpha;
  }
}

}  // namespace detail

void project_left_consistency(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                              std::size_t edge) {
  detail::apply_consistency(g, gamma, dual, edge, Side::row, false);
}

void normalize_left(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                    std::size_t edge) {
  normalize(gamma, dual, edge, g.edge(edge).i);
}

void project_right_consistency(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                               std::size_t edge) {
  detail::apply_consistency(g, gamma, dual, edge, Side::col, false);
}

void normalize_right(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                     std::size_t edge) {
  normalize(gamma, dual, edge, g.edge(edge).j);
}

void apply_projection(const GraphTopology& g, MarginalVector& gamma, DualState& dual,
                      std::size_t edge, ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::left_consistency: return project_left_consistency(g, gamma, dual, edge);
    case ProjectionKind::left_normalization: return normalize_left(g, gamma, dual, edge);
    case ProjectionKind::right_consistency: return project_right_consistency(g, gamma, dual, edge);
    case ProjectionKind::right_normalization: return normalize_right(g, gamma, dual, edge);
  }
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double diff = std::sqrt(p[k]) - std::sqrt(q[k]);
    acc += diff * diff;
  }
  return 0.5 * acc;
}

std::vector<double> edge_marginal(const MarginalVector& gamma, std::size_t edge, Side side) {
  const std::size_t d = gamma.num_labels();
  const double* block = gamma.edge(edge).data();
  std::vector<double> out(d);
  for (std::size_t x = 0; x < d; ++x)
    out[x] = side == Side::row ? std::exp(log_sum_exp(block + x * d, d))
                               : std::exp(log_sum_exp(block + x, d, d));
  return out;
}

std::vector<double> vertex_marginal(const MarginalVector& gamma, std::size_t vertex) {
  const auto block = gamma.vertex(vertex);
  std::vector<double> out(block.size());
  std::transform(block.begin(), block.end(), out.begin(), [](double v) { return std::exp(v); });
  return out;
}

DualResidual dual_residual(const Model& model, double eta, const MarginalVector& gamma,
                           const DualState& dual) {
  const auto& g = model.topology;
  const std::size_t d = g.num_labels();
  DualResidual out;

  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto lrow = dual.row_multiplier(e);
    const auto lcol = dual.col_multiplier(e);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const double stored = gamma.at(e, a, b);
        const double base = -eta * model.costs.at(e, a, b);
        out.zeta = std::max(out.zeta, std::abs(stored - (base + dual.zeta.at(e, a, b))));
        const double rebuilt = base - lrow[a] - lcol[b] - dual.xi_edge[e];
        out.decomposition = std::max(out.decomposition, std::abs(stored - rebuilt));
      }
  }

  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    for (std::size_t a = 0; a < d; ++a) {
      const double stored = gamma.vertex(v)[a];
      const double base = -eta * model.costs.vertex(v)[a];
      out.zeta = std::max(out.zeta, std::abs(stored - (base + dual.zeta.vertex(v)[a])));
      double rebuilt = base - dual.xi_vertex[v];
      for (const auto& [e, side] : g.incident(v))
        rebuilt += side == Side::row ? dual.row_multiplier(e)[a] : dual.col_multiplier(e)[a];
      out.decomposition = std::max(out.decomposition, std::abs(stored - rebuilt));
    }
  }
  return out;
}

}  // namespace emp
