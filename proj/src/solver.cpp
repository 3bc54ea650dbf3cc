#include "emp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "emp/bounds.hpp"
#include "emp/error.hpp"
#include "emp/format.hpp"
#include "emp/log_math.hpp"
#include "emp/lyapunov.hpp"
#include "emp/violation_tracker.hpp"

namespace emp {

std::string_view to_string(Variant variant) noexcept {
  return variant == Variant::cyclic ? "cyclic" : "greedy";
}

Variant parse_variant(std::string_view name) {
  if (name == "cyclic") return Variant::cyclic;
  if (name == "greedy") return Variant::greedy;
  throw Error(ErrorKind::invalid_argument, "unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(TraceKind kind) noexcept {
  switch (kind) {
    case TraceKind::left_cons: return "left_cons";
    case TraceKind::left_norm: return "left_norm";
    case TraceKind::right_cons: return "right_cons";
    case TraceKind::right_norm: return "right_norm";
    case TraceKind::sweep_end: return "sweep_end";
  }
  return "unknown";
}

EmpState initialize(const Model& model, double eta) {
  const auto& g = model.topology;
  EmpState s{MarginalVector(g), DualState::zeros(g)};

  const auto fill = [eta](std::span<const double> costs, std::span<double> log_gamma,
                          std::span<double> zeta) {
    for (std::size_t k = 0; k < costs.size(); ++k) log_gamma[k] = -eta * costs[k];
    const double log_norm = log_sum_exp(log_gamma);
    for (std::size_t k = 0; k < costs.size(); ++k) {
      log_gamma[k] -= log_norm;
      zeta[k] = -log_norm;
    }
    return log_norm;
  };
  for (std::size_t e = 0; e < g.num_edges(); ++e)
    s.dual.xi_edge[e] = fill(model.costs.edge(e), s.gamma.edge(e), s.dual.zeta.edge(e));
  for (std::size_t v = 0; v < g.num_vertices(); ++v)
    s.dual.xi_vertex[v] = fill(model.costs.vertex(v), s.gamma.vertex(v), s.dual.zeta.vertex(v));
  return s;
}

Assignment round_marginals(const MarginalVector& gamma) {
  Assignment out;
  out.labels.resize(gamma.num_vertices());
  for (std::size_t v = 0; v < gamma.num_vertices(); ++v) {
    const auto block = gamma.vertex(v);
    out.labels[v] = static_cast<std::size_t>(std::max_element(block.begin(), block.end()) - block.begin());
  }
  return out;
}

double integrality_margin(const MarginalVector& gamma) {
  double margin = 1.0;
  for (std::size_t v = 0; v < gamma.num_vertices(); ++v) {
    const auto block = gamma.vertex(v);
    const double top = *std::max_element(block.begin(), block.end());
    margin = std::min(margin, std::exp(top - log_sum_exp(block)));
  }
  return margin;
}

namespace {

TraceKind trace_kind(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::left_consistency: return TraceKind::left_cons;
    case ProjectionKind::left_normalization: return TraceKind::left_norm;
    case ProjectionKind::right_consistency: return TraceKind::right_cons;
    case ProjectionKind::right_normalization: return TraceKind::right_norm;
  }
  return TraceKind::sweep_end;
}

Side consistency_side(ProjectionKind kind) {
  return kind == ProjectionKind::left_consistency ? Side::row : Side::col;
}

void check_config(const SolverConfig& config) {
  if (!(config.eta > 0.0) || !std::isfinite(config.eta))
    throw Error(ErrorKind::invalid_argument, "eta must be positive and finite");
  if (!(config.epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
}

std::size_t resolve_cap(const Model& model, const SolverConfig& config) {
  if (config.max_iterations > 0) return config.max_iterations;
  const auto& g = model.topology;
  const auto bounds =
      iteration_bounds(compute_S0(model, config.eta), config.epsilon, g.max_degree());
  const double steps_per_iteration =
      config.variant == Variant::cyclic ? 4.0 * static_cast<double>(g.num_edges()) : 2.0;
  const auto cap = static_cast<std::uint64_t>(kDefaultProjectionStepCap / steps_per_iteration);
  const auto bound = config.variant == Variant::cyclic ? bounds.cyclic : bounds.greedy;
  return static_cast<std::size_t>(std::max<std::uint64_t>(1, std::min(bound, cap)));
}

// Owns the primal/dual state of one run and applies single projections,
// tracking the Lyapunov value incrementally from the two blocks each step
// touches.
class Engine {
 public:
  Engine(const Model& model, const SolverConfig& config)
      : model_(model),
        config_(config),
        state_(initialize(model, config.eta)),
        tracking_(config.record_trace || config.assert_theory),
        start_(std::chrono::steady_clock::now()) {
    const auto initial = evaluate_lyapunov(model, config.eta, state_.dual);
    initial_variable_ = initial.variable;
    variable_ = initial.variable;
    constant_ = initial.constant;
    if (config.record_trace) trace_.emplace();
  }

  void enable_tracker() {
    if (!tracker_) tracker_ = std::make_unique<ViolationTracker>(model_.topology, state_.gamma);
  }
  ViolationTracker* tracker() { return tracker_.get(); }

  const MarginalVector& gamma() const { return state_.gamma; }
  std::size_t steps() const { return steps_; }
  double variable() const { return variable_; }
  bool tracking() const { return tracking_; }
  TheoryAudit& audit() { return audit_; }

  double lyapunov_total() const {
    if (tracking_) return variable_ + constant_;
    return lyapunov(model_, config_.eta, state_.dual);
  }

  void project(std::size_t edge, ProjectionKind kind, std::size_t iteration) {
    const auto& g = model_.topology;
    const double eta = config_.eta;
    const std::size_t vertex = projected_vertex(g, edge, kind);
    const bool consistency = is_consistency(kind);

    LyapunovTerm edge_before, vertex_before;
    double predicted = 0.0;
    if (tracking_) {
      edge_before = lyapunov_edge_term(model_, eta, state_.dual, edge);
      vertex_before = lyapunov_vertex_term(model_, eta, state_.dual, vertex);
    }
    if (config_.assert_theory && consistency) {
      const auto side = consistency_side(kind);
      predicted = 2.0 * hellinger_sq(edge_marginal(state_.gamma, edge, side),
                                     vertex_marginal(state_.gamma, vertex));
    }

    if (consistency)
      detail::apply_consistency(g, state_.gamma, state_.dual, edge, consistency_side(kind),
                                config_.inject_sign_fault);
    else
      apply_projection(g, state_.gamma, state_.dual, edge, kind);
    ++steps_;
    if (tracker_) tracker_->refresh_vertex(vertex);
    if (!tracking_) return;

    const auto edge_after = lyapunov_edge_term(model_, eta, state_.dual, edge);
    const auto vertex_after = lyapunov_vertex_term(model_, eta, state_.dual, vertex);
    const double delta = (edge_before.mass + vertex_before.mass - edge_after.mass - vertex_after.mass) -
                         ((edge_after.xi - edge_before.xi) + (vertex_after.xi - vertex_before.xi));
    variable_ += delta;

    if (config_.assert_theory) audit_step(kind, delta, predicted, edge);
    if (trace_) {
      const auto [i, j] = g.edge(edge);
      trace_->steps.push_back({steps_, iteration, static_cast<long>(i), static_cast<long>(j),
                               trace_kind(kind), variable_ + constant_, delta,
                               tracker_ ? tracker_->top().value : 0.0, elapsed()});
    }
  }

  void record_sweep_end(std::size_t iteration, double variable_before, double max_violation) {
    if (!trace_) return;
    trace_->steps.push_back({steps_, iteration, -1, -1, TraceKind::sweep_end, variable_ + constant_,
                             variable_ - variable_before, max_violation, elapsed()});
  }

  void audit_greedy_step(double gain) {
    const double excess = gain - 0.25 * config_.epsilon * config_.epsilon;
    ++audit_.greedy_steps;
    audit_.min_greedy_excess = std::min(audit_.min_greedy_excess, excess);
    if (excess < -kGreedyProgressTol) fail("greedy step gained less than eps^2/4");
  }

  SolveResult finish(std::size_t iterations, std::size_t sweeps, std::size_t cap) {
    SolveResult r;
    r.variant = config_.variant;
    r.iterations_used = iterations;
    r.projection_steps = steps_;
    r.sweeps = sweeps;
    r.max_iterations = cap;
    r.final_max_violation = max_violation(model_.topology, state_.gamma).value;
    r.converged = r.final_max_violation < config_.epsilon;
    r.rounded = round_marginals(state_.gamma);
    r.integrality_margin = integrality_margin(state_.gamma);
    const auto final_value = evaluate_lyapunov(model_, config_.eta, state_.dual);
    r.initial_lyapunov = initial_variable_ + constant_;
    r.final_lyapunov = final_value.total();
    r.lyapunov_gain = final_value.variable - initial_variable_;
    r.audit = audit_;
    if (trace_) {
      trace_->converged = r.converged;
      r.trace = std::move(trace_);
    }
    r.final_marginals = std::move(state_.gamma);
    r.final_dual = std::move(state_.dual);
    return r;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void fail(const std::string& what) {
    if (audit_.failures++ == 0) audit_.first_failure = what + " at projection " + std::to_string(steps_);
  }

  void audit_step(ProjectionKind kind, double delta, double predicted, std::size_t edge) {
    audit_.min_step_gain = std::min(audit_.min_step_gain, delta);
    if (delta < -kMonotoneTol) fail("Lyapunov decreased on edge " + std::to_string(edge));
    if (is_consistency(kind)) {
      ++audit_.consistency_steps;
      const double residual = std::abs(delta - predicted);
      const double relative = residual / std::max(1.0, std::abs(variable_));
      audit_.worst_exact_absolute = std::max(audit_.worst_exact_absolute, residual);
      audit_.worst_exact_residual = std::max(audit_.worst_exact_residual, relative);
      if (relative > kExactImprovementTol) fail("consistency gain differs from 2h^2 on edge " + std::to_string(edge));
    } else {
      ++audit_.normalization_steps;
      audit_.min_normalization_gain = std::min(audit_.min_normalization_gain, delta);
      if (delta < -kMonotoneTol) fail("normalization decreased L on edge " + std::to_string(edge));
    }
  }

  const Model& model_;
  SolverConfig config_;
  EmpState state_;
  bool tracking_;
  double initial_variable_ = 0.0;
  double variable_ = 0.0;
  double constant_ = 0.0;
  std::size_t steps_ = 0;
  TheoryAudit audit_;
  std::optional<SolveTrace> trace_;
  std::unique_ptr<ViolationTracker> tracker_;
  std::chrono::steady_clock::time_point start_;
};

constexpr ProjectionKind kSweepOrder[] = {
    ProjectionKind::left_consistency, ProjectionKind::left_normalization,
    ProjectionKind::right_consistency, ProjectionKind::right_normalization};

}  // namespace

SolveResult emp_cyclic(const Model& model, const SolverConfig& config, const SweepObserver& observer) {
  validate_model(model);
  check_config(config);
  SolverConfig cfg = config;
  cfg.variant = Variant::cyclic;
  const std::size_t cap = resolve_cap(model, cfg);

  Engine engine(model, cfg);
  if (cfg.record_trace) engine.enable_tracker();

  const auto& g = model.topology;
  std::size_t sweep = 0;
  double violation = max_violation(g, engine.gamma()).value;
  while (violation >= cfg.epsilon && sweep < cap) {
    ++sweep;
    const double before = engine.variable();
    for (std::size_t e = 0; e < g.num_edges(); ++e)
      for (const auto kind : kSweepOrder) engine.project(e, kind, sweep);
    violation = max_violation(g, engine.gamma()).value;
    engine.record_sweep_end(sweep, before, violation);
    if (observer) observer({sweep, engine.steps(), engine.gamma(), violation, engine.lyapunov_total()});
  }
  return engine.finish(sweep, sweep, cap);
}

SolveResult emp_greedy(const Model& model, const SolverConfig& config, const SweepObserver& observer) {
  validate_model(model);
  check_config(config);
  SolverConfig cfg = config;
  cfg.variant = Variant::greedy;
  const std::size_t cap = resolve_cap(model, cfg);

  Engine engine(model, cfg);
  engine.enable_tracker();
  auto& tracker = *engine.tracker();

  const std::size_t per_sweep = model.topology.num_edges();
  std::size_t step = 0;
  double sweep_start = engine.variable();
  const auto end_sweep = [&](std::size_t sweep) {
    const double violation = tracker.top().value;
    engine.record_sweep_end(step, sweep_start, violation);
    if (observer) observer({sweep, engine.steps(), engine.gamma(), violation, engine.lyapunov_total()});
    sweep_start = engine.variable();
  };

  while (step < cap) {
    const auto worst = tracker.top();
    if (worst.value < cfg.epsilon) break;
    ++step;
    const double before = engine.variable();
    if (worst.side == Side::row) {
      engine.project(worst.edge, ProjectionKind::left_consistency, step);
      engine.project(worst.edge, ProjectionKind::left_normalization, step);
    } else {
      engine.project(worst.edge, ProjectionKind::right_consistency, step);
      engine.project(worst.edge, ProjectionKind::right_normalization, step);
    }
    if (cfg.assert_theory) engine.audit_greedy_step(engine.variable() - before);
    if (step % per_sweep == 0) end_sweep(step / per_sweep);
  }
  const std::size_t sweeps = (step + per_sweep - 1) / per_sweep;
  if (step % per_sweep != 0) end_sweep(sweeps);
  return engine.finish(step, sweeps, cap);
}

SolveResult solve(const Model& model, const SolverConfig& config, const SweepObserver& observer) {
  return config.variant == Variant::cyclic ? emp_cyclic(model, config, observer)
                                           : emp_greedy(model, config, observer);
}

FixedPointReport fixed_point_check(const GraphTopology& g, const MarginalVector& gamma,
                                   const DualState& dual, double tol) {
  MarginalVector work = gamma;
  DualState work_dual = dual;
  FixedPointReport report;

  const auto max_change = [](std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(std::exp(a[k]) - std::exp(b[k])));
    return worst;
  };

  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    for (const auto kind : kSweepOrder) {
      const std::size_t v = projected_vertex(g, e, kind);
      apply_projection(g, work, work_dual, e, kind);
      const double change = std::max(max_change(work.edge(e), gamma.edge(e)),
                                     max_change(work.vertex(v), gamma.vertex(v)));
      if (change > report.max_change) {
        report.max_change = change;
        report.edge = e;
        report.kind = kind;
      }
      std::copy(gamma.edge(e).begin(), gamma.edge(e).end(), work.edge(e).begin());
      std::copy(gamma.vertex(v).begin(), gamma.vertex(v).end(), work.vertex(v).begin());
    }
  }
  report.is_fixed = report.max_change <= tol;
  return report;
}

std::string trace_to_csv(const SolveTrace& trace) {
  std::ostringstream out;
  out << "step,iteration,edge_i,edge_j,kind,lyapunov,delta_l,max_violation\n";
  for (const auto& r : trace.steps)
    out << r.step << ',' << r.iteration << ',' << r.edge_i << ',' << r.edge_j << ','
        << to_string(r.kind) << ',' << format_double(r.lyapunov) << ',' << format_double(r.delta_l)
        << ',' << format_double(r.max_violation) << '\n';
  return out.str();
}

nlohmann::json result_to_json(const SolveResult& result) {
  return {
      {"assignment", result.rounded.labels},
      {"converged", result.converged},
      {"iterations", result.iterations_used},
      {"integrality_margin", result.integrality_margin},
  };
}

}  // namespace emp
