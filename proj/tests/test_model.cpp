#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "emp/error.hpp"
#include "emp/model.hpp"
#include "emp/model_io.hpp"
#include "support.hpp"

using namespace emp;
using emp::test::set_edge;
using emp::test::set_vertex;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an emp::Error");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_SUITE("model_core") {

TEST_CASE("validate_model accepts the minimal model") {
  const Model m = test::single_edge_model(2);
  CHECK_NOTHROW(validate_model(m));
}

TEST_CASE("validate_model rejects structural problems") {
  SUBCASE("isolated vertex") {
    GraphTopology g(3, 2, {{0, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::isolated_vertex);
  }
  SUBCASE("reversed edge") {
    GraphTopology g(2, 2, {{1, 0}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::non_canonical_edge);
  }
  SUBCASE("duplicate edge") {
    GraphTopology g(2, 2, {{0, 1}, {0, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::duplicate_edge);
  }
  SUBCASE("unsorted edge list") {
    GraphTopology g(3, 2, {{1, 2}, {0, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::non_canonical_edge);
  }
  SUBCASE("self loop") {
    GraphTopology g(2, 2, {{0, 1}, {1, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::non_canonical_edge);
  }
  SUBCASE("wrong cost dimensions") {
    GraphTopology g(2, 2, {{0, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(2, 3, 1)); }) == ErrorKind::dimension_mismatch);
  }
  SUBCASE("one label") {
    GraphTopology g(2, 1, {{0, 1}});
    CHECK(kind_of([&] { validate_model(g, PotentialVector(g)); }) == ErrorKind::dimension_mismatch);
  }
  SUBCASE("non-finite cost") {
    Model m = test::single_edge_model(2);
    m.costs.at(0, 1, 1) = std::nan("");
    CHECK(kind_of([&] { validate_model(m); }) == ErrorKind::non_finite_cost);
  }
  SUBCASE("edge out of range") {
    CHECK(kind_of([] { GraphTopology(2, 2, {{0, 2}}); }) == ErrorKind::dimension_mismatch);
  }
}

TEST_CASE("degrees and incidence lists") {
  GraphTopology g(4, 2, {{0, 1}, {0, 2}, {0, 3}, {2, 3}});
  CHECK(g.degree(0) == 3);
  CHECK(g.degree(1) == 1);
  CHECK(g.degree(3) == 2);
  CHECK(g.max_degree() == 3);
  std::size_t rows = 0;
  for (const auto& inc : g.incident(0)) rows += inc.side == Side::row;
  CHECK(rows == 3);
  const auto inc3 = g.incident(3);
  REQUIRE(inc3.size() == 2);
  CHECK(inc3[0].side == Side::col);
  CHECK(inc3[1].side == Side::col);
}

TEST_CASE("edge_violations on the worked example") {
  GraphTopology g(2, 2, {{0, 1}});
  MarginalVector gamma(g);
  set_edge(gamma, 0, {0.4, 0.2, 0.1, 0.3});
  set_vertex(gamma, 0, {0.5, 0.5});
  set_vertex(gamma, 1, {0.5, 0.5});
  const auto v = edge_violations(g, gamma, 0);
  CHECK(v.row_l1 == doctest::Approx(0.2).epsilon(1e-12));
  // columns sum to (0.5, 0.5)
  CHECK(v.col_l1 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("product and uniform joints have no violation") {
  std::mt19937_64 rng(5);
  for (std::size_t d = 2; d <= 4; ++d) {
    GraphTopology g(2, d, {{0, 1}});
    MarginalVector gamma(g);
    const auto p = test::random_simplex(d, rng);
    const auto q = test::random_simplex(d, rng);
    std::vector<double> joint;
    for (double a : p)
      for (double b : q) joint.push_back(a * b);
    set_edge(gamma, 0, joint);
    set_vertex(gamma, 0, p);
    set_vertex(gamma, 1, q);
    const auto v = edge_violations(g, gamma, 0);
    CHECK(v.row_l1 < 1e-14);
    CHECK(v.col_l1 < 1e-14);

    MarginalVector uniform(g);
    for (auto& x : uniform.edge_values()) x = -std::log(double(d * d));
    for (auto& x : uniform.vertex_values()) x = -std::log(double(d));
    const auto u = edge_violations(g, uniform, 0);
    CHECK(u.row_l1 < 1e-14);
    CHECK(u.col_l1 < 1e-14);
  }
}

TEST_CASE("max_violation tie-breaks") {
  GraphTopology g(3, 2, {{0, 1}, {1, 2}});
  MarginalVector gamma(g);
  for (auto& x : gamma.edge_values()) x = std::log(0.25);
  for (auto& x : gamma.vertex_values()) x = std::log(0.5);

  SUBCASE("all satisfied") {
    const auto v = max_violation(g, gamma);
    CHECK(v.edge == 0);
    CHECK(v.side == Side::row);
    CHECK(v.value == 0.0);
  }
  SUBCASE("single row violation") {
    set_edge(gamma, 1, {0.35, 0.25, 0.15, 0.25});  // rows (0.6, 0.4), columns (0.5, 0.5)
    const auto v = max_violation(g, gamma);
    CHECK(v.edge == 1);
    CHECK(v.side == Side::row);
    CHECK(v.value == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("equal violations on two edges") {
    set_edge(gamma, 0, {0.3, 0.25, 0.2, 0.25});
    set_edge(gamma, 1, {0.3, 0.25, 0.2, 0.25});
    const auto v = max_violation(g, gamma);
    CHECK(v.edge == 0);
    CHECK(v.side == Side::row);
    CHECK(v.value == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("max_violation equals the largest edge_violations entry") {
  std::mt19937_64 rng(11);
  GraphTopology g(4, 3, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  for (int trial = 0; trial < 50; ++trial) {
    MarginalVector gamma(g);
    test::randomize(gamma, rng);
    double best = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const auto v = edge_violations(g, gamma, e);
      CHECK(v.row_l1 >= 0.0);
      CHECK(v.col_l1 >= 0.0);
      best = std::max({best, v.row_l1, v.col_l1});
    }
    CHECK(max_violation(g, gamma).value == best);
  }
}

TEST_CASE("slack vectors sum to zero for normalized blocks") {
  std::mt19937_64 rng(3);
  GraphTopology g(3, 3, {{0, 1}, {1, 2}});
  MarginalVector gamma(g);
  for (std::size_t e = 0; e < 2; ++e) set_edge(gamma, e, test::random_simplex(9, rng));
  for (std::size_t v = 0; v < 3; ++v) set_vertex(gamma, v, test::random_simplex(3, rng));
  const SlackVector s = compute_slack(g, gamma);
  for (std::size_t e = 0; e < 2; ++e) {
    double r = 0.0, c = 0.0;
    for (double x : s.row_slack(e)) r += x;
    for (double x : s.col_slack(e)) c += x;
    CHECK(std::abs(r) < 1e-10);
    CHECK(std::abs(c) < 1e-10);
  }
}

TEST_CASE("assignment_cost sums vertex and edge costs") {
  Model m = test::single_edge_model(2, {0, 1, 2, 3}, {10, 20}, {100, 200});
  CHECK(assignment_cost(m, {{1, 0}}) == 20 + 100 + 2);
  CHECK_THROWS_AS(assignment_cost(m, {{1}}), Error);
}

TEST_CASE("model JSON round trip") {
  Model m = test::single_edge_model(2, {0, 1, 2, 3}, {0.5, -0.5}, {1.5, 2.5});
  const auto doc = model_to_json(m);
  CHECK(doc["edge_costs"][0][1][0] == 2.0);
  const Model back = model_from_json(doc);
  CHECK(back.topology == m.topology);
  CHECK(back.costs == m.costs);

  const auto dir = std::filesystem::temp_directory_path() / "emp_model_io_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "m.json", doc.dump());
  CHECK(load_model(dir / "m.json").costs == m.costs);
  CHECK_FALSE(std::filesystem::exists(dir / "m.json.tmp"));

  std::ofstream(dir / "bad.json") << "{\"n\": 2";
  CHECK(kind_of([&] { load_model(dir / "bad.json"); }) == ErrorKind::parse);
  CHECK(kind_of([&] { load_model(dir / "missing.json"); }) == ErrorKind::io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model JSON with wrong shapes") {
  auto doc = model_to_json(test::single_edge_model(2));
  doc["vertex_costs"].push_back({0.0, 0.0});
  CHECK(kind_of([&] { model_from_json(doc); }) == ErrorKind::dimension_mismatch);
  auto missing = model_to_json(test::single_edge_model(2));
  missing.erase("edges");
  CHECK(kind_of([&] { model_from_json(missing); }) == ErrorKind::parse);
}

}
