#include "emp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emp/error.hpp"

namespace emp {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
}

double uniform01(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

GraphTopology grid_graph(std::size_t side, std::size_t num_labels) {
  if (side < 2) throw Error(ErrorKind::dimension_mismatch, "grid side must be at least 2");
  std::vector<Edge> edges;
  edges.reserve(2 * side * (side - 1));
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t v = r * side + c;
      if (c + 1 < side) edges.push_back({v, v + 1});
      if (r + 1 < side) edges.push_back({v, v + side});
    }
  std::sort(edges.begin(), edges.end());
  return GraphTopology(side * side, num_labels, std::move(edges));
}

GraphTopology erdos_renyi(std::size_t n, std::size_t num_labels, std::uint64_t seed,
                          std::optional<std::size_t> max_degree) {
  if (n < 2) throw Error(ErrorKind::dimension_mismatch, "need at least 2 vertices");
  if (max_degree && *max_degree == 0)
    throw Error(ErrorKind::unrepairable, "degree cap 0 leaves every vertex isolated");

  const double p = 1.1 * std::log(static_cast<double>(n)) / static_cast<double>(n);
  const std::size_t cap = max_degree.value_or(n);
  std::mt19937_64 rng(derive_seed(seed, Stream::topology));

  std::vector<Edge> edges;
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      // Draw for every pair so the cap does not shift later decisions.
      const bool include = uniform01(rng) < p;
      if (!include || degree[i] >= cap || degree[j] >= cap) continue;
      edges.push_back({i, j});
      ++degree[i];
      ++degree[j];
    }

  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] > 0) continue;
    std::optional<std::size_t> partner;
    for (std::size_t dist = 1; dist < n && !partner; ++dist) {
      if (v >= dist && degree[v - dist] < cap) partner = v - dist;
      else if (v + dist < n && degree[v + dist] < cap) partner = v + dist;
    }
    if (!partner)
      throw Error(ErrorKind::unrepairable,
                  "vertex " + std::to_string(v) + " is isolated and every other vertex is at the cap");
    edges.push_back({std::min(v, *partner), std::max(v, *partner)});
    ++degree[v];
    ++degree[*partner];
  }

  std::sort(edges.begin(), edges.end());
  return GraphTopology(n, num_labels, std::move(edges));
}

PotentialVector potts_costs(const GraphTopology& g, const PottsConfig& config) {
  if (config.num_labels != g.num_labels())
    throw Error(ErrorKind::dimension_mismatch, "Potts label count differs from the topology");
  if (config.beta_choices.empty())
    throw Error(ErrorKind::invalid_argument, "beta_choices must not be empty");
  if (!(config.alpha_low <= config.alpha_high))
    throw Error(ErrorKind::invalid_argument, "alpha range must satisfy low <= high");

  std::mt19937_64 rng(derive_seed(config.seed, Stream::costs));
  PotentialVector costs(g);
  const double width = config.alpha_high - config.alpha_low;
  for (auto& c : costs.vertex_values()) c = config.alpha_low + width * uniform01(rng);

  const std::size_t d = g.num_labels();
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const std::size_t pick = static_cast<std::size_t>(rng() % config.beta_choices.size());
    auto block = costs.edge(e);
    for (std::size_t x = 0; x < d; ++x) block[x * d + x] = config.beta_choices[pick];
  }
  return costs;
}

}  // namespace emp
