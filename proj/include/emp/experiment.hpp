#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emp/model.hpp"
#include "emp/solver.hpp"

namespace emp {

enum class GraphFamily { grid, erdos_renyi };

struct ExperimentSpec {
  GraphFamily family = GraphFamily::grid;
  /// Vertex counts. Grid sizes must be perfect squares (9 -> 3 x 3).
  std::vector<std::size_t> sizes;
  std::vector<double> eta_values;
  double epsilon = 1e-3;
  std::vector<Variant> variants{Variant::cyclic};
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  /// Sweeps per run; greedy runs get iteration_budget * |E| steps.
  std::size_t iteration_budget = 80;
  /// Empty means a single uncapped configuration. Ignored for grids.
  std::vector<std::size_t> degree_caps;
  std::size_t num_labels = 3;
  double alpha_low = -0.5;
  double alpha_high = 0.5;
  std::vector<double> beta_choices{-0.1, 0.1};
  bool assert_theory = false;
  std::size_t threads = 0;  ///< 0 = hardware concurrency
};

ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc);
ExperimentSpec load_experiment_spec(const std::string& path);

/// Seed of one generated instance; shared by every eta and variant.
std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t n, std::optional<std::size_t> cap,
                            std::size_t trial) noexcept;

Model generate_instance(const ExperimentSpec& spec, std::size_t n, std::optional<std::size_t> cap,
                        std::size_t trial);

struct RunRecord {
  std::size_t n = 0;
  std::optional<std::size_t> degree_cap;
  double eta = 0.0;
  Variant variant = Variant::cyclic;
  std::size_t trial = 0;
  bool oracle_ran = false;
  bool oracle_unique = false;
  bool recovered = false;  ///< rounded output equals the oracle optimum
  bool converged = false;
  double integrality_margin = 0.0;
  std::size_t sweeps = 0;
  std::size_t projection_steps = 0;
  double final_hamming = 0.0;
  bool audit_ok = true;
};

struct ExperimentOutput {
  std::vector<RunRecord> runs;  ///< ordered by (n, cap, trial, eta, variant)
  std::string csv;              ///< family,n,deg_cap,eta,variant,trial,sweep,hamming,max_violation,lyapunov
  nlohmann::json summary;
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

double median(std::vector<double> values);

}  // namespace emp
