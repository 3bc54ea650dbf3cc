#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "emp/model.hpp"

namespace emp {

/// Accumulated dual sums: log Gamma = -eta C + zeta, entry by entry.
using DualSums = BlockVector<struct DualSumTag>;

// Dual variables of the regularized problem over the local polytope.
//
//   log Gamma_ij(a,b) = -eta C_ij(a,b) - lambda_row[ij](a) - lambda_col[ij](b) - xi_edge[ij]
//   log Gamma_i(a)    = -eta C_i(a) - xi_vertex[i]
//                       + sum_{ij : i row} lambda_row[ij](a) + sum_{ki : i col} lambda_col[ki](a)
//
// `zeta` carries the same information summed per entry, so the primal can be
// rebuilt without replaying the decomposition.
struct DualState {
  std::size_t num_labels = 0;
  std::vector<double> lambda_row;
  std::vector<double> lambda_col;
  std::vector<double> xi_edge;
  std::vector<double> xi_vertex;
  DualSums zeta;

  static DualState zeros(const GraphTopology& topology);

  std::span<double> row_multiplier(std::size_t e) {
    return {lambda_row.data() + e * num_labels, num_labels};
  }
  std::span<const double> row_multiplier(std::size_t e) const {
    return {lambda_row.data() + e * num_labels, num_labels};
  }
  std::span<double> col_multiplier(std::size_t e) {
    return {lambda_col.data() + e * num_labels, num_labels};
  }
  std::span<const double> col_multiplier(std::size_t e) const {
    return {lambda_col.data() + e * num_labels, num_labels};
  }

  friend bool operator==(const DualState&, const DualState&) = default;
};

enum class ProjectionKind { left_consistency, left_normalization, right_consistency, right_normalization };

std::string_view to_string(ProjectionKind kind) noexcept;

inline bool is_consistency(ProjectionKind kind) noexcept {
  return kind == ProjectionKind::left_consistency || kind == ProjectionKind::right_consistency;
}

/// Vertex whose marginal the projection touches: i for left, j for right.
std::size_t projected_vertex(const GraphTopology& topology, std::size_t edge, ProjectionKind kind);

// Closed-form KL projections onto one constraint of one edge. Each updates the
// edge block, the touched vertex block and the dual state additively, and
// throws ErrorKind::zero_mass if a required sum is zero or non-finite.

/// Gamma_ij(a,.) *= sqrt(Gamma_i(a) / r(a)), Gamma_i(a) *= sqrt(r(a) / Gamma_i(a))
/// with r = Gamma_ij 1; afterwards both equal the geometric mean.
void project_left_consistency(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                              std::size_t edge);
/// Divides Gamma_i and Gamma_ij by their totals.
void normalize_left(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                    std::size_t edge);
void project_right_consistency(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                               std::size_t edge);
void normalize_right(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                     std::size_t edge);

void apply_projection(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                      std::size_t edge, ProjectionKind kind);

/// h^2(p, q) = 1/2 sum (sqrt p - sqrt q)^2.
double hellinger_sq(std::span<const double> p, std::span<const double> q);

/// Linear-space row sums (side == row) or column sums of an edge block.
std::vector<double> edge_marginal(const MarginalVector& gamma, std::size_t edge, Side side);
/// Linear-space vertex distribution (not renormalized).
std::vector<double> vertex_marginal(const MarginalVector& gamma, std::size_t vertex);

struct DualResidual {
  double zeta = 0.0;           ///< max |log Gamma - (-eta C + zeta)|
  double decomposition = 0.0;  ///< max |log Gamma - lambda/xi reconstruction|
};

DualResidual dual_residual(const Model& model, double eta, const MarginalVector& gamma,
                           const DualState& dual);

namespace detail {
/// Consistency update with the dual step optionally negated. Only used to
/// inject a known fault when exercising the theory checks.
void apply_consistency(const GraphTopology& topology, MarginalVector& gamma, DualState& dual,
                       std::size_t edge, Side side, bool flip_sign);
}  // namespace detail

}  // namespace emp
