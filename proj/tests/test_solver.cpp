#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "emp/bounds.hpp"
#include "emp/error.hpp"
#include "emp/generators.hpp"
#include "emp/log_math.hpp"
#include "emp/lyapunov.hpp"
#include "emp/oracle.hpp"
#include "emp/solver.hpp"
#include "support.hpp"

using namespace emp;

namespace {

Model potts_grid(std::size_t side, std::size_t d, std::uint64_t seed) {
  GraphTopology g = grid_graph(side, d);
  PottsConfig p;
  p.num_labels = d;
  p.seed = seed;
  PotentialVector c = potts_costs(g, p);
  return Model{std::move(g), std::move(c)};
}

SolverConfig config(double eta, double eps, Variant v) {
  SolverConfig c;
  c.eta = eta;
  c.epsilon = eps;
  c.variant = v;
  c.assert_theory = true;
  return c;
}

}  // namespace

TEST_SUITE("emp_solver") {

TEST_CASE("initialize") {
  SUBCASE("zero costs give uniform marginals") {
    const Model m = test::single_edge_model(3);
    const EmpState s = initialize(m, 2.0);
    for (double x : s.gamma.vertex_values()) CHECK(std::exp(x) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    for (double x : s.gamma.edge_values()) CHECK(std::exp(x) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    for (double x : s.dual.lambda_row) CHECK(x == 0.0);
    CHECK(s.dual.xi_edge[0] == doctest::Approx(std::log(9.0)).epsilon(1e-15));
  }
  SUBCASE("softmax of the vertex costs") {
    const double eta = 4.0;
    const Model m = test::single_edge_model(2, {}, {0.0, std::log(3.0) / eta});
    const EmpState s = initialize(m, eta);
    CHECK(std::exp(s.gamma.vertex(0)[0]) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(std::exp(s.gamma.vertex(0)[1]) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(s.dual.xi_vertex[0] == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  }
  SUBCASE("eta 700 keeps every log-value finite") {
    const Model m = potts_grid(3, 3, 12);
    const EmpState s = initialize(m, 700.0);
    for (double x : s.gamma.edge_values()) CHECK(std::isfinite(x));
    for (double x : s.gamma.vertex_values()) CHECK(std::isfinite(x));
    for (std::size_t v = 0; v < 9; ++v) CHECK(std::abs(log_sum_exp(s.gamma.vertex(v))) < 1e-12);
  }
}

TEST_CASE("feasible initialization returns without projecting") {
  const Model m = test::single_edge_model(2);
  for (const Variant v : {Variant::cyclic, Variant::greedy}) {
    const SolveResult r = solve(m, config(1.0, 1e-3, v));
    CHECK(r.converged);
    CHECK(r.iterations_used == 0);
    CHECK(r.projection_steps == 0);
    CHECK(r.rounded.labels == std::vector<std::size_t>{0, 0});
    CHECK(r.integrality_margin == doctest::Approx(0.5));
  }
}

TEST_CASE("rounding") {
  GraphTopology g(2, 2, {{0, 1}});
  MarginalVector gamma(g);
  test::set_vertex(gamma, 0, {0.9, 0.1});
  test::set_vertex(gamma, 1, {0.5, 0.5});
  CHECK(round_marginals(gamma).labels == std::vector<std::size_t>{0, 0});
  test::set_vertex(gamma, 0, {0.1, 0.9});
  CHECK(round_marginals(gamma).labels == std::vector<std::size_t>{1, 0});
  CHECK(integrality_margin(gamma) == doctest::Approx(0.5));

  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    MarginalVector a(GraphTopology(3, 4, {{0, 1}, {1, 2}}));
    test::randomize(a, rng);
    MarginalVector b = a;
    for (std::size_t v = 0; v < 3; ++v) {
      const double shift = std::uniform_real_distribution<double>(-5, 5)(rng);
      for (auto& x : b.vertex(v)) x += shift;
    }
    CHECK(round_marginals(a) == round_marginals(b));
  }
}

TEST_CASE("cyclic recovers the enumerated optimum at large eta") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Model m = potts_grid(3, 3, seed);
    const OracleResult truth = brute_force_map(m);
    SolverConfig c = config(700.0, 1e-3, Variant::cyclic);
    c.max_iterations = 80;
    const SolveResult r = solve(m, c);
    CHECK(r.audit.ok());
    if (truth.unique && r.integrality_margin >= 0.9 && r.converged) {
      ++checked;
      CHECK(r.rounded == truth.best);
      CHECK(assignment_cost(m, r.rounded) == doctest::Approx(-truth.best_value));
    }
    CHECK(-assignment_cost(m, r.rounded) <= truth.best_value + 1e-12);
  }
  CHECK(checked > 0);
}

TEST_CASE("both variants agree on confident runs") {
  std::size_t compared = 0;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const Model m = potts_grid(3, 3, seed);
    SolverConfig c = config(700.0, 1e-3, Variant::cyclic);
    const SolveResult cyc = solve(m, c);
    c.variant = Variant::greedy;
    const SolveResult gr = solve(m, c);
    if (cyc.converged && gr.converged && cyc.integrality_margin >= 0.9 && gr.integrality_margin >= 0.9) {
      ++compared;
      CHECK(cyc.rounded == gr.rounded);
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("runs stay within the iteration bounds") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Model m = potts_grid(2 + seed % 2, 2 + seed % 2, seed);
    for (const double eps : {1e-1, 1e-2}) {
      const double eta = 2.0;
      const auto bounds = iteration_bounds(compute_S0(m, eta), eps, m.topology.max_degree());
      const SolveResult cyc = solve(m, config(eta, eps, Variant::cyclic));
      const SolveResult gr = solve(m, config(eta, eps, Variant::greedy));
      CHECK(cyc.converged);
      CHECK(gr.converged);
      CHECK(cyc.iterations_used <= bounds.cyclic);
      CHECK(gr.iterations_used <= bounds.greedy);
      CHECK(cyc.max_iterations == std::min<std::uint64_t>(bounds.cyclic, static_cast<std::uint64_t>(1e7 / (4.0 * m.topology.num_edges()))));
      CHECK(cyc.lyapunov_gain <= compute_S0(m, eta) + 1e-6);
      CHECK(gr.audit.ok());
      CHECK(gr.audit.min_greedy_excess >= -kGreedyProgressTol);
    }
  }
}

TEST_CASE("converged means below epsilon; the cap reports not converged") {
  const Model m = potts_grid(3, 3, 3);
  SolverConfig c = config(50.0, 1e-6, Variant::cyclic);
  c.max_iterations = 2;
  const SolveResult capped = solve(m, c);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations_used == 2);
  CHECK(capped.final_max_violation >= 1e-6);

  c.max_iterations = 0;
  c.epsilon = 1e-3;
  const SolveResult done = solve(m, c);
  CHECK(done.converged);
  CHECK(done.final_max_violation < 1e-3);
  CHECK(max_violation(m.topology, done.final_marginals).value < 1e-3);
}

TEST_CASE("greedy sweep accounting") {
  const Model m = potts_grid(3, 3, 21);
  std::vector<std::size_t> sweeps;
  std::size_t last_steps = 0;
  const SolveResult r = emp_greedy(m, config(20.0, 1e-3, Variant::greedy), [&](const SweepSnapshot& s) {
    sweeps.push_back(s.sweep);
    last_steps = s.projection_steps;
  });
  REQUIRE(!sweeps.empty());
  CHECK(r.projection_steps == 2 * r.iterations_used);
  CHECK(last_steps == r.projection_steps);
  CHECK(sweeps.back() == r.sweeps);
  CHECK(r.sweeps == (r.iterations_used + m.topology.num_edges() - 1) / m.topology.num_edges());
  for (std::size_t k = 0; k < sweeps.size(); ++k) CHECK(sweeps[k] == k + 1);
}

TEST_CASE("trace contents") {
  const Model m = potts_grid(2, 3, 8);
  SolverConfig c = config(5.0, 1e-4, Variant::cyclic);
  c.record_trace = true;
  const SolveResult r = solve(m, c);
  REQUIRE(r.trace);
  const auto& steps = r.trace->steps;
  CHECK(steps.size() == r.iterations_used * (4 * m.topology.num_edges() + 1));
  double prev = -std::numeric_limits<double>::infinity();
  std::size_t sweep_ends = 0;
  for (const auto& s : steps) {
    if (s.kind == TraceKind::sweep_end) {
      ++sweep_ends;
      CHECK(s.edge_i == -1);
      continue;
    }
    CHECK(s.lyapunov >= prev - 1e-12 * std::max(1.0, std::abs(prev)));
    CHECK(s.delta_l >= -1e-12);
    prev = s.lyapunov;
  }
  CHECK(sweep_ends == r.iterations_used);
  // The incrementally tracked value agrees with a full evaluation.
  CHECK(steps.back().lyapunov == doctest::Approx(r.final_lyapunov).epsilon(1e-10));
  CHECK(steps.back().max_violation == doctest::Approx(r.final_max_violation).epsilon(1e-12));
  CHECK(r.trace->converged == r.converged);

  const std::string csv = trace_to_csv(*r.trace);
  CHECK(csv.rfind("step,iteration,edge_i,edge_j,kind,lyapunov,delta_l,max_violation\n", 0) == 0);
  CHECK(csv.find(",left_cons,") != std::string::npos);
  CHECK(csv.find(",-1,-1,sweep_end,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(steps.size() + 1));

  // Same inputs, same trace.
  const SolveResult again = solve(m, c);
  CHECK(trace_to_csv(*again.trace) == csv);
  CHECK(again.final_marginals == r.final_marginals);
}

TEST_CASE("greedy trace is monotone") {
  const Model m = potts_grid(3, 2, 9);
  SolverConfig c = config(10.0, 1e-4, Variant::greedy);
  c.record_trace = true;
  const SolveResult r = solve(m, c);
  CHECK(r.converged);
  CHECK(r.audit.ok());
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& s : r.trace->steps) {
    if (s.kind == TraceKind::sweep_end) continue;
    CHECK(s.lyapunov >= prev - 1e-12 * std::max(1.0, std::abs(prev)));
    prev = s.lyapunov;
  }
}

TEST_CASE("injected sign fault is caught by the audit") {
  const Model m = potts_grid(2, 2, 1);
  SolverConfig c = config(1.0, 1e-2, Variant::cyclic);
  c.inject_sign_fault = true;
  c.max_iterations = 5;
  const SolveResult r = solve(m, c);
  CHECK_FALSE(r.audit.ok());
  CHECK(r.audit.worst_exact_residual > kExactImprovementTol);
  CHECK(r.audit.min_step_gain < 0.0);
}

TEST_CASE("fixed point check") {
  SUBCASE("uniform feasible state") {
    const Model m = test::single_edge_model(3);
    const EmpState s = initialize(m, 1.0);
    const auto report = fixed_point_check(m.topology, s.gamma, s.dual, 1e-12);
    CHECK(report.max_change == 0.0);
    CHECK(report.is_fixed);
  }
  SUBCASE("converged run and a perturbed copy") {
    const Model m = potts_grid(3, 3, 2);
    SolverConfig c = config(5.0, 1e-6, Variant::cyclic);
    c.assert_theory = false;
    SolveResult r = solve(m, c);
    REQUIRE(r.converged);
    const auto at_solution = fixed_point_check(m.topology, r.final_marginals, r.final_dual, 1e-4);
    CHECK(at_solution.max_change <= 1e-4);
    CHECK(at_solution.is_fixed);

    MarginalVector perturbed = r.final_marginals;
    perturbed.vertex(4)[0] += std::log(2.0);
    const double z = log_sum_exp(perturbed.vertex(4));
    for (auto& x : perturbed.vertex(4)) x -= z;
    const auto moved = fixed_point_check(m.topology, perturbed, r.final_dual, 1e-4);
    CHECK(moved.max_change > 1e-4);
    CHECK_FALSE(moved.is_fixed);
  }
}

TEST_CASE("configuration errors") {
  const Model m = test::single_edge_model(2);
  CHECK_THROWS_AS(solve(m, config(0.0, 1e-3, Variant::cyclic)), Error);
  CHECK_THROWS_AS(solve(m, config(1.0, 0.0, Variant::greedy)), Error);
  CHECK_THROWS_AS(parse_variant("random"), Error);
  CHECK(parse_variant("greedy") == Variant::greedy);
  GraphTopology bad(3, 2, {{0, 1}});
  CHECK_THROWS_AS(solve(Model{bad, PotentialVector(bad)}, config(1.0, 1e-3, Variant::cyclic)), Error);
}

TEST_CASE("result JSON") {
  const Model m = potts_grid(2, 2, 4);
  const SolveResult r = solve(m, config(3.0, 1e-3, Variant::cyclic));
  const auto doc = result_to_json(r);
  CHECK(doc.size() == 4);
  CHECK(doc["assignment"].size() == 4);
  CHECK(doc["converged"].get<bool>() == r.converged);
  CHECK(doc["iterations"].get<std::size_t>() == r.iterations_used);
  CHECK(doc["integrality_margin"].get<double>() == r.integrality_margin);
}

}
