#include <doctest.h>

#include <random>

#include "emp/generators.hpp"
#include "emp/projections.hpp"
#include "emp/violation_tracker.hpp"
#include "support.hpp"

using namespace emp;

TEST_SUITE("emp_solver") {

TEST_CASE("violation heap tracks max_violation under incremental refresh") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const GraphTopology g = trial % 2 ? grid_graph(4, 3) : erdos_renyi(25, 3, trial, 5);
    MarginalVector gamma(g);
    DualState dual = DualState::zeros(g);
    test::randomize(gamma, rng);
    ViolationTracker tracker(g, gamma);
    for (int step = 0; step < 3000; ++step) {
      const std::size_t e = rng() % g.num_edges();
      const auto kind = static_cast<ProjectionKind>(rng() % 4);
      apply_projection(g, gamma, dual, e, kind);
      tracker.refresh_vertex(projected_vertex(g, e, kind));
      if (step % 37 == 0) {
        const Violation expected = max_violation(g, gamma);
        const Violation got = tracker.top();
        CHECK(got.value == expected.value);
        CHECK(got.edge == expected.edge);
        CHECK(got.side == expected.side);
        const auto ev = edge_violations(g, gamma, e);
        CHECK(tracker.value(e, Side::row) == ev.row_l1);
        CHECK(tracker.value(e, Side::col) == ev.col_l1);
      }
    }
  }
}

TEST_CASE("heap tie-break matches max_violation") {
  GraphTopology g(3, 2, {{0, 1}, {1, 2}});
  MarginalVector gamma(g);
  for (auto& x : gamma.edge_values()) x = std::log(0.25);
  for (auto& x : gamma.vertex_values()) x = std::log(0.5);
  ViolationTracker tracker(g, gamma);
  const Violation v = tracker.top();
  CHECK(v.edge == 0);
  CHECK(v.side == Side::row);
  CHECK(v.value == 0.0);
}

}
