#include "emp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emp/error.hpp"

namespace emp {

namespace {

bool tied(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

// Depth-first enumeration in vertex order. Each vertex adds its unary cost and
// the costs of edges to lower-indexed neighbors, so every leaf sums its terms
// in the same order.
class Enumerator {
 public:
  explicit Enumerator(const Model& model) : model_(model), back_edges_(model.topology.num_vertices()) {
    const auto& g = model.topology;
    for (std::size_t e = 0; e < g.num_edges(); ++e) back_edges_[g.edge(e).j].push_back(e);
    labels_.assign(g.num_vertices(), 0);
  }

  OracleResult run() {
    descend(0, 0.0);
    out_.unique = out_.count_optimal == 1;
    if (!out_.unique) out_.second_value = out_.best_value;
    return out_;
  }

 private:
  void descend(std::size_t v, double cost) {
    const auto& g = model_.topology;
    if (v == g.num_vertices()) {
      record(-cost);
      return;
    }
    for (std::size_t x = 0; x < g.num_labels(); ++x) {
      labels_[v] = x;
      double c = cost + model_.costs.vertex(v)[x];
      for (std::size_t e : back_edges_[v]) c += model_.costs.at(e, labels_[g.edge(e).i], x);
      descend(v + 1, c);
    }
  }

  void record(double value) {
    if (out_.count_optimal == 0) {
      out_.best = Assignment{labels_};
      out_.best_value = value;
      out_.count_optimal = 1;
    } else if (tied(value, out_.best_value)) {
      ++out_.count_optimal;
    } else if (value > out_.best_value) {
      second_ = out_.best_value;
      out_.best = Assignment{labels_};
      out_.best_value = value;
      out_.count_optimal = 1;
    } else {
      second_ = std::max(second_, value);
    }
    out_.second_value = second_;
  }

  const Model& model_;
  std::vector<std::vector<std::size_t>> back_edges_;
  std::vector<std::size_t> labels_;
  OracleResult out_;
  double second_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

OracleResult brute_force_map(const Model& model) {
  const auto& g = model.topology;
  const double count = std::pow(static_cast<double>(g.num_labels()), static_cast<double>(g.num_vertices()));
  if (count > kMaxEnumeration)
    throw Error(ErrorKind::too_large, std::to_string(g.num_labels()) + "^" +
                                          std::to_string(g.num_vertices()) + " assignments exceed the enumeration limit");
  return Enumerator(model).run();
}

double integral_lp_objective(const Model& model, const Assignment& assignment) {
  const auto& g = model.topology;
  const std::size_t d = g.num_labels();
  // Dense indicator blocks, then a plain inner product with theta = -C.
  std::vector<double> vertex_ind(g.num_vertices() * d, 0.0);
  std::vector<double> edge_ind(g.num_edges() * d * d, 0.0);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) vertex_ind[v * d + assignment.labels[v]] = 1.0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    edge_ind[(e * d + assignment.labels[i]) * d + assignment.labels[j]] = 1.0;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < vertex_ind.size(); ++k) total += -model.costs.vertex_values()[k] * vertex_ind[k];
  for (std::size_t k = 0; k < edge_ind.size(); ++k) total += -model.costs.edge_values()[k] * edge_ind[k];
  return total;
}

double golden_section_search(const std::function<bool(double, double)>& lower, double lo, double hi,
                             double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  while (hi - lo > tol) {
    if (lower(a, b)) {
      hi = b;
      b = a;
      a = hi - ratio * (hi - lo);
    } else {
      lo = a;
      a = b;
      b = lo + ratio * (hi - lo);
    }
  }
  return 0.5 * (lo + hi);
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tol) {
  return golden_section_search([&](double a, double b) { return f(a) < f(b); }, lo, hi, tol);
}

KlProjection kl_projection_oracle(std::span<const double> gamma_edge,
                                  std::span<const double> gamma_vertex, Side side) {
  const std::size_t d = gamma_vertex.size();
  if (gamma_edge.size() != d * d)
    throw Error(ErrorKind::dimension_mismatch, "edge block must be d x d");
  const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!std::all_of(gamma_edge.begin(), gamma_edge.end(), positive) ||
      !std::all_of(gamma_vertex.begin(), gamma_vertex.end(), positive))
    throw Error(ErrorKind::non_positive_input, "projection oracle needs strictly positive inputs");

  const auto index = [&](std::size_t x, std::size_t y) { return side == Side::row ? x * d + y : y * d + x; };
  constexpr double bracket = 50.0;

  KlProjection out{std::vector<double>(gamma_edge.begin(), gamma_edge.end()),
                   std::vector<double>(gamma_vertex.begin(), gamma_vertex.end()),
                   std::vector<double>(d)};
  for (std::size_t x = 0; x < d; ++x) {
    double slice = 0.0;
    for (std::size_t y = 0; y < d; ++y) slice += gamma_edge[index(x, y)];
    const double p = gamma_vertex[x];
    // g(a) - g(b) for g(t) = slice e^{-t} + p e^{t}, written as
    // expm1(a - b) (p e^b - slice e^{-a}) so the comparison keeps its sign
    // near the flat minimum.
    const auto lower = [&](double a, double b) {
      return std::expm1(a - b) * (p * std::exp(b) - slice * std::exp(-a)) < 0.0;
    };
    const double alpha = golden_section_search(lower, -bracket, bracket, 1e-10);
    if (std::abs(alpha) > bracket - 1e-6)
      throw Error(ErrorKind::non_positive_input, "dual step left the search bracket");
    out.alpha[x] = alpha;
    for (std::size_t y = 0; y < d; ++y) out.edge[index(x, y)] *= std::exp(-alpha);
    out.vertex[x] *= std::exp(alpha);
  }
  return out;
}

}  // namespace emp
