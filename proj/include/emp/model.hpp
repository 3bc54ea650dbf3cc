#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace emp {

// Edges are stored canonically with i < j; rows of an edge block index the
// state of i, columns the state of j.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Side : std::uint8_t { row, col };

// One end of an edge as seen from a vertex: `side == row` means the vertex is
// the lower-indexed endpoint.
struct Incidence {
  std::size_t edge = 0;
  Side side = Side::row;
};

class GraphTopology {
 public:
  GraphTopology() = default;

  /// Builds degree and incidence tables. Only endpoint range is checked here;
  /// the remaining structural invariants are checked by validate_model.
  GraphTopology(std::size_t num_vertices, std::size_t num_labels, std::vector<Edge> edges);

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const noexcept { return max_degree_; }

  std::span<const Incidence> incident(std::size_t v) const {
    return {incidence_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  friend bool operator==(const GraphTopology& a, const GraphTopology& b) {
    return a.num_vertices_ == b.num_vertices_ && a.num_labels_ == b.num_labels_ &&
           a.edges_ == b.edges_;
  }

 private:
  std::size_t num_vertices_ = 0;
  std::size_t num_labels_ = 0;
  std::size_t max_degree_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidence_;
};

// Per-vertex d-vectors and per-edge row-major d x d matrices laid out flat.
// The tag keeps costs, log-marginals and dual sums from being mixed up.
template <typename Tag>
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t num_vertices, std::size_t num_labels, std::size_t num_edges)
      : num_vertices_(num_vertices),
        num_labels_(num_labels),
        num_edges_(num_edges),
        vertex_(num_vertices * num_labels, 0.0),
        edge_(num_edges * num_labels * num_labels, 0.0) {}

  explicit BlockVector(const GraphTopology& g)
      : BlockVector(g.num_vertices(), g.num_labels(), g.num_edges()) {}

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_labels() const noexcept { return num_labels_; }
  std::size_t num_edges() const noexcept { return num_edges_; }

  std::span<double> vertex(std::size_t v) {
    return {vertex_.data() + v * num_labels_, num_labels_};
  }
  std::span<const double> vertex(std::size_t v) const {
    return {vertex_.data() + v * num_labels_, num_labels_};
  }
  std::span<double> edge(std::size_t e) {
    return {edge_.data() + e * num_labels_ * num_labels_, num_labels_ * num_labels_};
  }
  std::span<const double> edge(std::size_t e) const {
    return {edge_.data() + e * num_labels_ * num_labels_, num_labels_ * num_labels_};
  }

  double& at(std::size_t e, std::size_t xi, std::size_t xj) {
    return edge_[(e * num_labels_ + xi) * num_labels_ + xj];
  }
  double at(std::size_t e, std::size_t xi, std::size_t xj) const {
    return edge_[(e * num_labels_ + xi) * num_labels_ + xj];
  }

  std::vector<double>& vertex_values() noexcept { return vertex_; }
  const std::vector<double>& vertex_values() const noexcept { return vertex_; }
  std::vector<double>& edge_values() noexcept { return edge_; }
  const std::vector<double>& edge_values() const noexcept { return edge_; }

  friend bool operator==(const BlockVector&, const BlockVector&) = default;

 private:
  std::size_t num_vertices_ = 0;
  std::size_t num_labels_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<double> vertex_;
  std::vector<double> edge_;
};

/// Cost vector C = -theta.
using PotentialVector = BlockVector<struct CostTag>;
/// Pseudo-marginals stored as log-values.
using MarginalVector = BlockVector<struct LogMarginalTag>;

struct Model {
  GraphTopology topology;
  PotentialVector costs;
};

struct Assignment {
  std::vector<std::size_t> labels;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Marginalization residuals nu_ij = Gamma_ij 1 - Gamma_i and
// nu_ji = Gamma_ij^T 1 - Gamma_j, one d-vector per edge and side.
struct SlackVector {
  std::size_t num_labels = 0;
  std::vector<double> row;
  std::vector<double> col;

  std::span<const double> row_slack(std::size_t e) const {
    return {row.data() + e * num_labels, num_labels};
  }
  std::span<const double> col_slack(std::size_t e) const {
    return {col.data() + e * num_labels, num_labels};
  }
};

struct EdgeViolation {
  double row_l1 = 0.0;
  double col_l1 = 0.0;
};

struct Violation {
  std::size_t edge = 0;
  Side side = Side::row;
  double value = 0.0;
};

/// Throws emp::Error on dimension disagreement, non-finite costs, non-canonical
/// or duplicate edges, or a vertex without edges.
void validate_model(const GraphTopology& topology, const PotentialVector& costs);
inline void validate_model(const Model& model) { validate_model(model.topology, model.costs); }

/// l1 marginalization violations of one edge, measured in linear space.
EdgeViolation edge_violations(const GraphTopology& topology, const MarginalVector& gamma,
                              std::size_t edge);

/// Largest violation over all edges and both sides. Ties go to the smallest
/// edge index, then row before column.
Violation max_violation(const GraphTopology& topology, const MarginalVector& gamma);

SlackVector compute_slack(const GraphTopology& topology, const MarginalVector& gamma);

/// Sum of C over the vertex and edge entries selected by the assignment; the
/// MAP objective is its negation.
double assignment_cost(const Model& model, const Assignment& assignment);

}  // namespace emp
