#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "emp/model.hpp"

namespace emp {

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

enum class Stream : std::uint64_t { topology = 1, costs = 2 };

/// Seed for one purpose (topology or costs) derived from a run seed, so that
/// changing the label count or cost ranges never perturbs the graph.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept;

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
double uniform01(std::mt19937_64& rng) noexcept;

struct PottsConfig {
  std::size_t num_labels = 3;
  double alpha_low = -0.5;
  double alpha_high = 0.5;
  std::vector<double> beta_choices{-0.1, 0.1};
  std::uint64_t seed = 0;
};

/// side x side grid, vertex (r, c) -> r * side + c, edges sorted.
GraphTopology grid_graph(std::size_t side, std::size_t num_labels);

/// G(n, p) with p = 1.1 ln(n) / n. Pairs are visited lexicographically; with a
/// cap, a pair is skipped if either endpoint is already at the cap. Isolated
/// vertices are then attached to the nearest non-saturated vertex by index
/// (lower index wins a tie). Throws Unrepairable if none exists.
GraphTopology erdos_renyi(std::size_t n, std::size_t num_labels, std::uint64_t seed,
                          std::optional<std::size_t> max_degree = std::nullopt);

/// Vertex costs ~ U[alpha_low, alpha_high), edge costs beta * [x == y] with one
/// beta per edge drawn from beta_choices.
PotentialVector potts_costs(const GraphTopology& topology, const PottsConfig& config);

}  // namespace emp
