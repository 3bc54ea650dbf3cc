#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emp/model.hpp"
#include "emp/projections.hpp"

namespace emp {

enum class Variant { cyclic, greedy };

std::string_view to_string(Variant variant) noexcept;
Variant parse_variant(std::string_view name);

/// Projection steps a single run may take when max_iterations is left at 0.
inline constexpr double kDefaultProjectionStepCap = 1e7;

struct SolverConfig {
  double eta = 1.0;
  double epsilon = 1e-3;
  /// Sweeps (cyclic) or greedy steps. 0 selects the iteration bound for the
  /// model, capped at kDefaultProjectionStepCap projection steps.
  std::size_t max_iterations = 0;
  Variant variant = Variant::cyclic;
  bool record_trace = false;
  /// Checks every projection against the exact Lyapunov improvement, the
  /// normalization monotonicity and (greedy) the eps^2/4 progress guarantee.
  bool assert_theory = false;
  /// Negates the consistency step. Mutation testing of the checks only.
  bool inject_sign_fault = false;
};

// Tolerances used by assert_theory.
inline constexpr double kExactImprovementTol = 1e-8;  ///< relative to max(1, |L|)
inline constexpr double kMonotoneTol = 1e-12;
inline constexpr double kGreedyProgressTol = 1e-9;

enum class TraceKind { left_cons, left_norm, right_cons, right_norm, sweep_end };

std::string_view to_string(TraceKind kind) noexcept;

struct StepRecord {
  std::size_t step = 0;       ///< 1-based projection index; sweep_end repeats the last one
  std::size_t iteration = 0;  ///< 1-based sweep (cyclic) or greedy step
  long edge_i = -1;           ///< -1 on sweep_end rows
  long edge_j = -1;
  TraceKind kind = TraceKind::sweep_end;
  double lyapunov = 0.0;
  double delta_l = 0.0;  ///< sweep_end rows carry the change over the whole sweep
  double max_violation = 0.0;
  double elapsed_seconds = 0.0;
};

struct SolveTrace {
  std::vector<StepRecord> steps;
  bool converged = false;
};

struct TheoryAudit {
  std::size_t consistency_steps = 0;
  std::size_t normalization_steps = 0;
  std::size_t greedy_steps = 0;
  double worst_exact_residual = 0.0;  ///< max |dL - 2h^2| / max(1, |L|)
  double worst_exact_absolute = 0.0;  ///< max |dL - 2h^2|
  double min_normalization_gain = std::numeric_limits<double>::infinity();
  double min_step_gain = std::numeric_limits<double>::infinity();
  double min_greedy_excess = std::numeric_limits<double>::infinity();  ///< min dL_step - eps^2/4
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const noexcept { return failures == 0; }
};

struct EmpState {
  MarginalVector gamma;
  DualState dual;
};

struct SolveResult {
  Variant variant = Variant::cyclic;
  Assignment rounded;
  MarginalVector final_marginals;
  DualState final_dual;
  std::size_t iterations_used = 0;  ///< sweeps (cyclic) or greedy steps
  std::size_t projection_steps = 0;
  std::size_t sweeps = 0;           ///< greedy: steps grouped per |E|, rounded up
  std::size_t max_iterations = 0;   ///< cap actually applied
  bool converged = false;
  double integrality_margin = 0.0;  ///< min over vertices of max_x Gamma_i(x)
  double final_max_violation = 0.0;
  double initial_lyapunov = 0.0;
  double final_lyapunov = 0.0;
  double lyapunov_gain = 0.0;  ///< L(final) - L(init), constant term cancelled
  TheoryAudit audit;
  std::optional<SolveTrace> trace;
};

struct SweepSnapshot {
  std::size_t sweep = 0;
  std::size_t projection_steps = 0;
  const MarginalVector& gamma;
  double max_violation = 0.0;
  double lyapunov = 0.0;
};

/// Called after every sweep (greedy: every |E| steps, plus a final partial one).
using SweepObserver = std::function<void(const SweepSnapshot&)>;

/// Normalized exp(-eta C) with lambda = 0 and xi set to the log normalizers.
EmpState initialize(const Model& model, double eta);

/// Per-vertex argmax of the marginals; ties go to the smallest label.
Assignment round_marginals(const MarginalVector& gamma);

double integrality_margin(const MarginalVector& gamma);

/// Applies the four projections to every edge in order per sweep until the
/// largest l1 violation drops below epsilon or the cap is reached. The check
/// runs before each sweep, so the state returned is the first post-sweep state
/// that satisfies it.
SolveResult emp_cyclic(const Model& model, const SolverConfig& config,
                       const SweepObserver& observer = {});

/// Repeatedly picks the (edge, side) with the largest violation and applies
/// that side's consistency and normalization projections.
SolveResult emp_greedy(const Model& model, const SolverConfig& config,
                       const SweepObserver& observer = {});

/// Dispatches on config.variant.
SolveResult solve(const Model& model, const SolverConfig& config, const SweepObserver& observer = {});

struct FixedPointReport {
  double max_change = 0.0;  ///< largest linear-space entry change of any single projection
  std::size_t edge = 0;
  ProjectionKind kind = ProjectionKind::left_consistency;
  bool is_fixed = false;
};

/// Applies every projection type on every edge to a copy of the state and
/// reports the largest entrywise change.
FixedPointReport fixed_point_check(const GraphTopology& topology, const MarginalVector& gamma,
                                   const DualState& dual, double tol);

/// step,iteration,edge_i,edge_j,kind,lyapunov,delta_l,max_violation
std::string trace_to_csv(const SolveTrace& trace);

/// {"assignment", "converged", "iterations", "integrality_margin"}
nlohmann::json result_to_json(const SolveResult& result);

}  // namespace emp
