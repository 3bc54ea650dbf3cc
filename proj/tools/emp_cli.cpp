// Command-line front end: solve, experiment, verify, bounds.
//
// Exit codes: 0 success/converged, 2 solver hit its cap, 1 any error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emp/bounds.hpp"
#include "emp/error.hpp"
#include "emp/experiment.hpp"
#include "emp/model_io.hpp"
#include "emp/solver.hpp"
#include "emp/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct SolveArgs {
  std::string model_path;
  double eta = 1.0;
  double epsilon = 1e-3;
  std::string variant = "cyclic";
  bool trace = false;
  bool bounds = false;
  bool assert_theory = false;
  std::size_t max_iterations = 0;
  std::optional<double> delta;
  bool delta_oracle = false;
};

struct ExperimentArgs {
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

struct VerifyArgs {
  std::string model_path;
  std::string battery = "grid2";
  std::size_t count = 10;
  std::uint64_t seed = 0;
  std::vector<double> eta_values{1.0, 5.0};
  std::vector<double> epsilons{1e-1, 1e-2};
  std::size_t oracle_pairs = 1000;
  std::size_t round_trip_steps = 10000;
  bool inject_fault = false;
};

struct BoundsArgs {
  std::string model_path;
  double eta = 1.0;
  double epsilon = 1e-3;
  std::optional<double> delta;
  bool delta_oracle = false;
};

void write_output(const fs::path& dir, const std::string& name, const std::string& contents) {
  fs::create_directories(dir);
  emp::write_file_atomic(dir / name, contents);
}

int run_solve(const SolveArgs& a, const fs::path& out_dir) {
  const emp::Model model = emp::load_model(a.model_path);
  emp::validate_model(model);

  emp::SolverConfig config;
  config.eta = a.eta;
  config.epsilon = a.epsilon;
  config.variant = emp::parse_variant(a.variant);
  config.record_trace = a.trace;
  config.assert_theory = a.assert_theory;
  config.max_iterations = a.max_iterations;
  if (a.bounds) {
    const auto report = emp::make_bounds_report(model, a.eta, a.epsilon, a.delta, a.delta_oracle);
    write_output(out_dir, "bounds.json", emp::to_json(report).dump(2) + "\n");
  }

  const emp::SolveResult result = emp::solve(model, config);
  write_output(out_dir, "result.json", emp::result_to_json(result).dump(2) + "\n");
  if (result.trace) write_output(out_dir, "trace.csv", emp::trace_to_csv(*result.trace));

  if (a.assert_theory && !result.audit.ok()) {
    std::cerr << "error: theory check failed (" << result.audit.failures
              << " violations): " << result.audit.first_failure << '\n';
    return kExitError;
  }
  std::cout << (result.converged ? "converged" : "not converged") << " after "
            << result.iterations_used << (config.variant == emp::Variant::cyclic ? " sweeps" : " greedy steps")
            << ", max violation " << result.final_max_violation << '\n';
  return result.converged ? kExitOk : kExitNotConverged;
}

int run_experiment(const ExperimentArgs& a, const fs::path& out_dir) {
  emp::ExperimentSpec spec = emp::load_experiment_spec(a.spec_path);
  if (a.seed) spec.base_seed = *a.seed;
  if (a.threads) spec.threads = *a.threads;
  const emp::ExperimentOutput out = emp::run_experiment(spec);
  write_output(out_dir, "experiment.csv", out.csv);
  write_output(out_dir, "summary.json", out.summary.dump(2) + "\n");
  std::cout << out.runs.size() << " runs written to " << (out_dir / "experiment.csv").string() << '\n';
  return kExitOk;
}

int run_verify(const VerifyArgs& a, const std::optional<fs::path>& out_dir) {
  emp::VerifyOptions options;
  if (!a.model_path.empty()) {
    emp::Model model = emp::load_model(a.model_path);
    emp::validate_model(model);
    options.models.push_back(std::move(model));
  } else if (a.battery == "grid2") {
    options.models = emp::small_grid_battery(a.seed, a.count);
  } else {
    options.models = emp::default_battery(a.seed, a.count);
  }
  options.eta_values = a.eta_values;
  options.epsilons = a.epsilons;
  options.oracle_pairs = a.oracle_pairs;
  options.round_trip_steps = a.round_trip_steps;
  options.seed = a.seed;
  options.inject_fault = a.inject_fault;

  const emp::VerifyReport report = emp::run_verify(options);
  std::cout << emp::to_text(report);
  if (out_dir) write_output(*out_dir, "verify.json", emp::to_json(report).dump(2) + "\n");
  return report.passed() ? kExitOk : kExitError;
}

int run_bounds(const BoundsArgs& a, const std::optional<fs::path>& out_dir) {
  const emp::Model model = emp::load_model(a.model_path);
  emp::validate_model(model);
  const auto report = emp::make_bounds_report(model, a.eta, a.epsilon, a.delta, a.delta_oracle);
  const std::string text = emp::to_json(report).dump(2) + "\n";
  std::cout << text;
  if (out_dir) write_output(*out_dir, "bounds.json", text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-regularized MAP inference by EMP projections"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir_text;
  app.add_option("--out-dir", out_dir_text, "Directory for output files");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one model and write result.json");
  solve->add_option("model", solve_args.model_path, "Model JSON file")->required();
  solve->add_option("--eta", solve_args.eta, "Regularization strength")->check(CLI::PositiveNumber);
  solve->add_option("--epsilon", solve_args.epsilon, "l1 stopping threshold")->check(CLI::PositiveNumber);
  solve->add_option("--variant", solve_args.variant, "cyclic or greedy")->check(CLI::IsMember({"cyclic", "greedy"}));
  solve->add_flag("--trace", solve_args.trace, "Write trace.csv");
  solve->add_flag("--bounds", solve_args.bounds, "Write bounds.json");
  solve->add_flag("--assert-theory", solve_args.assert_theory, "Check every projection against the theory");
  solve->add_option("--max-iterations", solve_args.max_iterations, "Sweep (cyclic) or step (greedy) cap; 0 = bound");
  solve->add_option("--delta", solve_args.delta, "Integrality gap for the eta thresholds");
  solve->add_flag("--delta-oracle", solve_args.delta_oracle, "Compute the gap by enumeration");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run a seeded experiment battery");
  experiment->add_option("spec", exp_args.spec_path, "Experiment JSON file")->required();
  experiment->add_option("--seed", exp_args.seed, "Override base_seed");
  experiment->add_option("--threads", exp_args.threads, "Worker threads");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check the theory invariants on a battery or a model");
  verify->add_option("--model", verify_args.model_path, "Verify a single model file instead of a battery");
  verify->add_option("--battery", verify_args.battery, "grid2 (2x2 grids) or mixed")->check(CLI::IsMember({"grid2", "mixed"}));
  verify->add_option("--count", verify_args.count, "Battery size");
  verify->add_option("--seed", verify_args.seed, "Battery seed");
  verify->add_option("--eta", verify_args.eta_values, "Eta values");
  verify->add_option("--epsilon", verify_args.epsilons, "Stopping thresholds");
  verify->add_option("--oracle-pairs", verify_args.oracle_pairs, "Random pairs for the projection oracle check");
  verify->add_option("--round-trip-steps", verify_args.round_trip_steps, "Random projections for the round trip check");
  verify->add_flag("--inject-fault", verify_args.inject_fault, "Negate the consistency step (must make checks fail)");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Print the theoretical bounds for a model");
  bounds->add_option("model", bounds_args.model_path, "Model JSON file")->required();
  bounds->add_option("--eta", bounds_args.eta, "Regularization strength")->check(CLI::PositiveNumber);
  bounds->add_option("--epsilon", bounds_args.epsilon, "l1 stopping threshold")->check(CLI::PositiveNumber);
  bounds->add_option("--delta", bounds_args.delta, "Integrality gap");
  bounds->add_flag("--delta-oracle", bounds_args.delta_oracle, "Compute the gap by enumeration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  const std::optional<fs::path> out_dir =
      out_dir_text.empty() ? std::nullopt : std::optional<fs::path>(out_dir_text);
  try {
    if (*solve) return run_solve(solve_args, out_dir.value_or("."));
    if (*experiment) return run_experiment(exp_args, out_dir.value_or("."));
    if (*verify) return run_verify(verify_args, out_dir);
    if (*bounds) return run_bounds(bounds_args, out_dir);
  } catch (const emp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}
