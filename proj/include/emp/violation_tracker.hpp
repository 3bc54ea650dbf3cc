#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

#include "emp/model.hpp"

namespace emp {

// Max-heap over the 2|E| (edge, side) violations with lazy deletion: a refresh
// bumps the slot's version and pushes a new entry, and stale entries are
// discarded when they reach the top. Ordering matches max_violation.
class ViolationTracker {
 public:
  ViolationTracker(const GraphTopology& topology, const MarginalVector& gamma);

  /// Recomputes both sides of every edge incident on `vertex`.
  void refresh_vertex(std::size_t vertex);
  void refresh_edge(std::size_t edge);

  Violation top();

  double value(std::size_t edge, Side side) const {
    return current_[slot(edge, side)];
  }

 private:
  struct Entry {
    double value;
    std::size_t edge;
    Side side;
    std::uint64_t version;
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.value != b.value) return a.value < b.value;
      if (a.edge != b.edge) return a.edge > b.edge;
      return a.side > b.side;
    }
  };

  static std::size_t slot(std::size_t edge, Side side) {
    return 2 * edge + (side == Side::row ? 0 : 1);
  }
  void rebuild();

  const GraphTopology* topology_;
  const MarginalVector* gamma_;
  std::vector<double> current_;
  std::vector<std::uint64_t> version_;
  std::priority_queue<Entry, std::vector<Entry>, Lower> heap_;
};

}  // namespace emp
