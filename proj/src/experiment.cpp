#include "emp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "emp/error.hpp"
#include "emp/format.hpp"
#include "emp/generators.hpp"
#include "emp/oracle.hpp"

namespace emp {

namespace {

using nlohmann::json;

template <typename T>
T field(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("experiment field '") + key + "': " + e.what());
  }
}

std::size_t grid_side(std::size_t n) {
  auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n || side < 2)
    throw Error(ErrorKind::invalid_argument,
                "grid size " + std::to_string(n) + " is not a square of a side >= 2");
  return side;
}

std::string family_name(GraphFamily f) { return f == GraphFamily::grid ? "grid" : "erdos_renyi"; }

std::string cap_name(std::optional<std::size_t> cap) {
  return cap ? std::to_string(*cap) : std::string("none");
}

double hamming(const Assignment& a, const Assignment& b) {
  std::size_t diff = 0;
  for (std::size_t v = 0; v < a.labels.size(); ++v) diff += a.labels[v] != b.labels[v];
  return static_cast<double>(diff) / static_cast<double>(a.labels.size());
}

struct Instance {
  std::size_t n;
  std::optional<std::size_t> cap;
  std::size_t trial;
};

struct InstanceOutput {
  std::vector<RunRecord> runs;
  std::string csv;
};

InstanceOutput run_instance(const ExperimentSpec& spec, const Instance& inst) {
  const Model model = generate_instance(spec, inst.n, inst.cap, inst.trial);
  std::optional<OracleResult> oracle;
  try {
    oracle = brute_force_map(model);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::too_large) throw;
  }

  InstanceOutput out;
  std::ostringstream csv;
  const std::size_t num_edges = model.topology.num_edges();
  for (const double eta : spec.eta_values)
    for (const Variant variant : spec.variants) {
      SolverConfig config;
      config.eta = eta;
      config.epsilon = spec.epsilon;
      config.variant = variant;
      config.assert_theory = spec.assert_theory;
      config.max_iterations =
          variant == Variant::cyclic ? spec.iteration_budget : spec.iteration_budget * num_edges;

      const std::string prefix = family_name(spec.family) + ',' + std::to_string(inst.n) + ',' +
                                 cap_name(inst.cap) + ',' + format_double(eta) + ',' +
                                 std::string(to_string(variant)) + ',' + std::to_string(inst.trial) + ',';
      const auto observer = [&](const SweepSnapshot& s) {
        csv << prefix << s.sweep << ',';
        if (oracle) csv << format_double(hamming(round_marginals(s.gamma), oracle->best));
        csv << ',' << format_double(s.max_violation) << ',' << format_double(s.lyapunov) << '\n';
      };
      const SolveResult result = solve(model, config, observer);

      RunRecord r;
      r.n = inst.n;
      r.degree_cap = inst.cap;
      r.eta = eta;
      r.variant = variant;
      r.trial = inst.trial;
      r.oracle_ran = oracle.has_value();
      r.oracle_unique = oracle && oracle->unique;
      r.recovered = oracle && result.rounded == oracle->best;
      r.final_hamming = oracle ? hamming(result.rounded, oracle->best) : 0.0;
      r.converged = result.converged;
      r.integrality_margin = result.integrality_margin;
      r.sweeps = result.sweeps;
      r.projection_steps = result.projection_steps;
      r.audit_ok = result.audit.ok();
      out.runs.push_back(r);
    }
  out.csv = csv.str();
  return out;
}

json summarize(const ExperimentSpec& spec, const std::vector<RunRecord>& runs) {
  using Key = std::tuple<std::size_t, std::size_t, double, int>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs)
    groups[{r.n, r.degree_cap.value_or(0), r.eta, static_cast<int>(r.variant)}].push_back(&r);

  json out = json::array();
  for (const auto& [key, members] : groups) {
    std::size_t unique = 0, ambiguous = 0, skipped = 0, converged = 0, recovered = 0;
    std::size_t filtered = 0, filtered_recovered = 0, audit_failures = 0;
    std::vector<double> sweeps, steps, converged_sweeps;
    for (const auto* r : members) {
      if (!r->oracle_ran) ++skipped;
      else if (r->oracle_unique) ++unique;
      else ++ambiguous;
      if (r->oracle_unique) {
        recovered += r->recovered;
        if (r->integrality_margin >= 0.9) {
          ++filtered;
          filtered_recovered += r->recovered;
        }
      }
      converged += r->converged;
      audit_failures += !r->audit_ok;
      sweeps.push_back(static_cast<double>(r->sweeps));
      steps.push_back(static_cast<double>(r->projection_steps));
      if (r->converged) converged_sweeps.push_back(static_cast<double>(r->sweeps));
    }
    const auto* first = members.front();
    const auto rate = [](std::size_t hit, std::size_t total) -> json {
      return total == 0 ? json(nullptr) : json(static_cast<double>(hit) / static_cast<double>(total));
    };
    json group = {
        {"family", family_name(spec.family)},
        {"n", first->n},
        {"deg_cap", first->degree_cap ? json(*first->degree_cap) : json(nullptr)},
        {"eta", first->eta},
        {"variant", to_string(first->variant)},
        {"trials", members.size()},
        {"unique_trials", unique},
        {"ambiguous_trials", ambiguous},
        {"oracle_skipped", skipped},
        {"converged", converged},
        {"recovered", recovered},
        {"recovery_rate", rate(recovered, unique)},
        {"margin_filtered_trials", filtered},
        {"margin_filtered_recovered", filtered_recovered},
        {"margin_filtered_recovery_rate", rate(filtered_recovered, filtered)},
        {"median_sweeps", median(sweeps)},
        {"median_projection_steps", median(steps)},
        {"median_sweeps_converged", converged_sweeps.empty() ? json(nullptr) : json(median(converged_sweeps))},
    };
    if (spec.assert_theory) group["audit_failures"] = audit_failures;
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::parse, "experiment spec must be a JSON object");
  ExperimentSpec s;
  const auto family = field<std::string>(doc, "family", "grid");
  if (family == "grid") s.family = GraphFamily::grid;
  else if (family == "erdos_renyi") s.family = GraphFamily::erdos_renyi;
  else throw Error(ErrorKind::parse, "unknown family '" + family + "'");

  s.sizes = field<std::vector<std::size_t>>(doc, "sizes", {});
  s.eta_values = field<std::vector<double>>(doc, "eta_values", {});
  s.epsilon = field<double>(doc, "epsilon", s.epsilon);
  const auto variants = field<std::vector<std::string>>(doc, "variants", {"cyclic"});
  s.variants.clear();
  for (const auto& v : variants) s.variants.push_back(parse_variant(v));
  s.trials = field<std::size_t>(doc, "trials", s.trials);
  s.base_seed = field<std::uint64_t>(doc, "base_seed", s.base_seed);
  s.iteration_budget = field<std::size_t>(doc, "iteration_budget", s.iteration_budget);
  s.degree_caps = field<std::vector<std::size_t>>(doc, "degree_caps", {});
  s.num_labels = field<std::size_t>(doc, "num_labels", s.num_labels);
  if (doc.contains("alpha_range")) {
    const auto range = field<std::vector<double>>(doc, "alpha_range", {});
    if (range.size() != 2) throw Error(ErrorKind::parse, "alpha_range needs two values");
    s.alpha_low = range[0];
    s.alpha_high = range[1];
  }
  s.beta_choices = field<std::vector<double>>(doc, "beta_choices", s.beta_choices);
  s.assert_theory = field<bool>(doc, "assert_theory", s.assert_theory);
  s.threads = field<std::size_t>(doc, "threads", s.threads);

  if (s.sizes.empty() || s.eta_values.empty() || s.variants.empty())
    throw Error(ErrorKind::invalid_argument, "sizes, eta_values and variants must be nonempty");
  if (s.trials < 1) throw Error(ErrorKind::invalid_argument, "trials must be at least 1");
  if (s.iteration_budget < 1) throw Error(ErrorKind::invalid_argument, "iteration_budget must be at least 1");
  if (!(s.epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  for (const double eta : s.eta_values)
    if (!(eta > 0.0)) throw Error(ErrorKind::invalid_argument, "eta values must be positive");
  if (s.family == GraphFamily::grid)
    for (const auto n : s.sizes) grid_side(n);
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path + ": " + e.what());
  }
  return experiment_spec_from_json(doc);
}

std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t n, std::optional<std::size_t> cap,
                            std::size_t trial) noexcept {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ n);
  h = splitmix64(h ^ (cap ? *cap + 1 : 0));
  return splitmix64(h ^ trial);
}

Model generate_instance(const ExperimentSpec& spec, std::size_t n, std::optional<std::size_t> cap,
                        std::size_t trial) {
  const std::uint64_t seed = instance_seed(spec.base_seed, n, cap, trial);
  GraphTopology g = spec.family == GraphFamily::grid ? grid_graph(grid_side(n), spec.num_labels)
                                                     : erdos_renyi(n, spec.num_labels, seed, cap);
  PottsConfig potts{spec.num_labels, spec.alpha_low, spec.alpha_high, spec.beta_choices, seed};
  PotentialVector costs = potts_costs(g, potts);
  return Model{std::move(g), std::move(costs)};
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  std::vector<Instance> instances;
  std::vector<std::optional<std::size_t>> caps;
  if (spec.family == GraphFamily::grid || spec.degree_caps.empty()) caps.push_back(std::nullopt);
  else
    for (const auto c : spec.degree_caps) caps.push_back(c);
  for (const auto n : spec.sizes)
    for (const auto& cap : caps)
      for (std::size_t t = 0; t < spec.trials; ++t) instances.push_back({n, cap, t});

  std::vector<InstanceOutput> results(instances.size());
  std::vector<std::exception_ptr> errors(instances.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < instances.size();) {
      try {
        results[k] = run_instance(spec, instances[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, instances.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentOutput out;
  out.csv = "family,n,deg_cap,eta,variant,trial,sweep,hamming,max_violation,lyapunov\n";
  for (auto& r : results) {
    out.csv += r.csv;
    out.runs.insert(out.runs.end(), r.runs.begin(), r.runs.end());
  }
  out.summary = {{"groups", summarize(spec, out.runs)}};
  return out;
}

}  // namespace emp
