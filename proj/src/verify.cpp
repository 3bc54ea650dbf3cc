#include "emp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "emp/bounds.hpp"
#include "emp/format.hpp"
#include "emp/generators.hpp"
#include "emp/oracle.hpp"
#include "emp/projections.hpp"
#include "emp/solver.hpp"

namespace emp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Sweep cap for runs with the fault injected; those never satisfy the bounds.
constexpr std::size_t kFaultCap = 50;

Model potts_model(GraphTopology g, std::uint64_t seed) {
  PottsConfig potts;
  potts.num_labels = g.num_labels();
  potts.seed = seed;
  PotentialVector costs = potts_costs(g, potts);
  return Model{std::move(g), std::move(costs)};
}

PropertyResult property(std::string name, bool passed, double worst, double tol, std::string detail) {
  return {std::move(name), passed, worst, tol, std::move(detail)};
}

std::string describe(std::size_t model, double eta, double eps, Variant v) {
  std::ostringstream s;
  s << "model " << model << " eta=" << eta << " eps=" << eps << ' ' << to_string(v);
  return s.str();
}

PropertyResult check_projection_oracle(std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ 0x6f7261636c65ULL));
  double worst = 0.0;
  std::string where = "no pairs";
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(rng() % 4);
    const Side side = rng() % 2 ? Side::col : Side::row;
    GraphTopology g(2, d, {{0, 1}});
    MarginalVector gamma(g);
    DualState dual = DualState::zeros(g);
    // Entries spread over about two decades.
    for (auto& v : gamma.edge_values()) v = -3.0 + 4.0 * uniform01(rng);
    for (auto& v : gamma.vertex_values()) v = -3.0 + 4.0 * uniform01(rng);

    std::vector<double> edge(d * d), vertex(d);
    for (std::size_t q = 0; q < d * d; ++q) edge[q] = std::exp(gamma.edge(0)[q]);
    const std::size_t v = side == Side::row ? 0 : 1;
    for (std::size_t x = 0; x < d; ++x) vertex[x] = std::exp(gamma.vertex(v)[x]);

    const KlProjection expected = kl_projection_oracle(edge, vertex, side);
    if (side == Side::row) project_left_consistency(g, gamma, dual, 0);
    else project_right_consistency(g, gamma, dual, 0);

    double err = 0.0;
    for (std::size_t q = 0; q < d * d; ++q)
      err = std::max(err, std::abs(std::exp(gamma.edge(0)[q]) - expected.edge[q]));
    for (std::size_t x = 0; x < d; ++x)
      err = std::max(err, std::abs(std::exp(gamma.vertex(v)[x]) - expected.vertex[x]));
    if (err >= worst) {
      worst = err;
      where = "pair " + std::to_string(k) + " d=" + std::to_string(d);
    }
  }
  return property("projection_oracle", worst <= 1e-6, worst, 1e-6,
                  std::to_string(pairs) + " pairs, worst at " + where);
}

PropertyResult check_round_trip(std::size_t steps, std::uint64_t seed) {
  const Model model = potts_model(grid_graph(3, 3), derive_seed(seed, Stream::costs));
  const double eta = 5.0;
  EmpState state = initialize(model, eta);
  std::mt19937_64 rng(splitmix64(seed ^ 0x7472697055ULL));
  const auto& g = model.topology;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t e = static_cast<std::size_t>(rng() % g.num_edges());
    const auto kind = static_cast<ProjectionKind>(rng() % 4);
    apply_projection(g, state.gamma, state.dual, e, kind);
  }
  const DualResidual r = dual_residual(model, eta, state.gamma, state.dual);
  return property("dual_primal_round_trip", r.zeta <= 1e-10, r.zeta, 1e-10,
                  std::to_string(steps) + " random projections on a 3x3 grid, lambda/xi reconstruction residual " +
                      format_double(r.decomposition));
}

}  // namespace

std::vector<Model> default_battery(std::uint64_t seed, std::size_t count) {
  std::vector<Model> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t s = splitmix64(seed + k);
    const std::size_t d = 2 + k % 2;
    if (k % 2 == 0) {
      out.push_back(potts_model(grid_graph(2 + (k / 2) % 3, d), s));
    } else {
      const std::size_t n = 5 + static_cast<std::size_t>(s % 26);
      out.push_back(potts_model(erdos_renyi(n, d, s), s));
    }
  }
  return out;
}

std::vector<Model> small_grid_battery(std::uint64_t seed, std::size_t count) {
  std::vector<Model> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(potts_model(grid_graph(2, 2), splitmix64(seed + k)));
  return out;
}

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

const PropertyResult* VerifyReport::find(const std::string& name) const {
  for (const auto& p : properties)
    if (p.name == name) return &p;
  return nullptr;
}

VerifyReport run_verify(const VerifyOptions& options) {
  VerifyReport report;

  double worst_exact = 0.0, worst_exact_abs = 0.0;
  double min_norm = kInf, min_step = kInf, min_greedy = kInf;
  double worst_gain_excess = -kInf;
  std::size_t bound_failures = 0, audit_failures = 0;
  std::string exact_where, bound_where, gain_where, first_audit;

  for (std::size_t m = 0; m < options.models.size(); ++m) {
    const Model& model = options.models[m];
    for (const double eta : options.eta_values) {
      const double S0 = compute_S0(model, eta);
      for (const double eps : options.epsilons) {
        const IterationBounds bounds = iteration_bounds(S0, eps, model.topology.max_degree());
        for (const Variant variant : {Variant::cyclic, Variant::greedy}) {
          SolverConfig config;
          config.eta = eta;
          config.epsilon = eps;
          config.variant = variant;
          config.assert_theory = true;
          config.inject_sign_fault = options.inject_fault;
          if (options.inject_fault) config.max_iterations = kFaultCap;
          const SolveResult r = solve(model, config);
          ++report.runs;
          const auto& a = r.audit;

          if (a.worst_exact_residual > worst_exact) {
            worst_exact = a.worst_exact_residual;
            exact_where = describe(m, eta, eps, variant);
          }
          worst_exact_abs = std::max(worst_exact_abs, a.worst_exact_absolute);
          min_norm = std::min(min_norm, a.min_normalization_gain);
          min_step = std::min(min_step, a.min_step_gain);
          if (variant == Variant::greedy) min_greedy = std::min(min_greedy, a.min_greedy_excess);
          if (!a.ok() && audit_failures++ == 0) first_audit = describe(m, eta, eps, variant) + ": " + a.first_failure;

          const std::uint64_t bound = variant == Variant::cyclic ? bounds.cyclic : bounds.greedy;
          if (!r.converged || r.iterations_used > bound) {
            if (bound_failures++ == 0)
              bound_where = describe(m, eta, eps, variant) + " used " + std::to_string(r.iterations_used) +
                            " of bound " + std::to_string(bound) + (r.converged ? "" : " without converging");
          }
          const double excess = r.lyapunov_gain - S0;
          if (excess > worst_gain_excess) {
            worst_gain_excess = excess;
            gain_where = describe(m, eta, eps, variant);
          }
        }
      }
    }
  }

  const std::string runs = std::to_string(report.runs) + " runs";
  report.properties.push_back(property(
      "consistency_gain_exact", worst_exact <= kExactImprovementTol, worst_exact, kExactImprovementTol,
      runs + ", worst |dL - 2h^2| = " + format_double(worst_exact_abs) +
          (exact_where.empty() ? "" : " (relative worst at " + exact_where + ")")));
  report.properties.push_back(property("normalization_monotone", min_norm >= -kMonotoneTol, min_norm,
                                       -kMonotoneTol, "smallest dL over normalization steps"));
  report.properties.push_back(property("lyapunov_monotone", min_step >= -kMonotoneTol, min_step,
                                       -kMonotoneTol, "smallest dL over all projection steps"));
  report.properties.push_back(property("greedy_progress", min_greedy >= -kGreedyProgressTol, min_greedy,
                                       -kGreedyProgressTol, "smallest (dL per greedy step - eps^2/4)"));
  report.properties.push_back(property("iteration_bounds", bound_failures == 0,
                                       static_cast<double>(bound_failures), 0.0,
                                       bound_failures == 0 ? runs + " within bound"
                                                           : std::to_string(bound_failures) + " runs failed, first: " + bound_where));
  report.properties.push_back(property("lyapunov_gain_bound", worst_gain_excess <= 1e-6, worst_gain_excess,
                                       1e-6, "largest L(final) - L(init) - S0" +
                                                 (gain_where.empty() ? "" : " at " + gain_where)));
  if (audit_failures > 0)
    report.properties.push_back(property("theory_audit", false, static_cast<double>(audit_failures), 0.0,
                                         std::to_string(audit_failures) + " runs flagged, first: " + first_audit));
  if (options.oracle_pairs > 0) report.properties.push_back(check_projection_oracle(options.oracle_pairs, options.seed));
  if (options.round_trip_steps > 0) report.properties.push_back(check_round_trip(options.round_trip_steps, options.seed));
  return report;
}

std::string to_text(const VerifyReport& report) {
  std::ostringstream out;
  for (const auto& p : report.properties)
    out << (p.passed ? "PASS " : "FAIL ") << p.name << "  worst=" << format_double(p.worst)
        << " tol=" << format_double(p.tolerance) << "  " << p.detail << '\n';
  out << (report.passed() ? "all properties passed" : "some properties failed") << '\n';
  return out.str();
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : report.properties)
    props.push_back({{"name", p.name}, {"passed", p.passed}, {"worst", p.worst},
                     {"tolerance", p.tolerance}, {"detail", p.detail}});
  return {{"passed", report.passed()}, {"runs", report.runs}, {"properties", props}};
}

}  // namespace emp
