#include "emp/violation_tracker.hpp"

namespace emp {

ViolationTracker::ViolationTracker(const GraphTopology& topology, const MarginalVector& gamma)
    : topology_(&topology),
      gamma_(&gamma),
      current_(2 * topology.num_edges(), 0.0),
      version_(2 * topology.num_edges(), 0) {
  for (std::size_t e = 0; e < topology.num_edges(); ++e) {
    const auto v = edge_violations(topology, gamma, e);
    current_[slot(e, Side::row)] = v.row_l1;
    current_[slot(e, Side::col)] = v.col_l1;
  }
  rebuild();
}

void ViolationTracker::rebuild() {
  std::vector<Entry> entries;
  entries.reserve(current_.size());
  for (std::size_t e = 0; e < topology_->num_edges(); ++e) {
    entries.push_back({current_[slot(e, Side::row)], e, Side::row, version_[slot(e, Side::row)]});
    entries.push_back({current_[slot(e, Side::col)], e, Side::col, version_[slot(e, Side::col)]});
  }
  heap_ = decltype(heap_)(Lower{}, std::move(entries));
}

void ViolationTracker::refresh_edge(std::size_t edge) {
  const auto v = edge_violations(*topology_, *gamma_, edge);
  for (const auto& [side, value] : {std::pair{Side::row, v.row_l1}, std::pair{Side::col, v.col_l1}}) {
    const auto s = slot(edge, side);
    current_[s] = value;
    heap_.push({value, edge, side, ++version_[s]});
  }
}

void ViolationTracker::refresh_vertex(std::size_t vertex) {
  for (const auto& inc : topology_->incident(vertex)) refresh_edge(inc.edge);
  if (heap_.size() > 8 * current_.size() + 64) rebuild();
}

Violation ViolationTracker::top() {
  if (current_.empty()) return {};
  while (heap_.top().version != version_[slot(heap_.top().edge, heap_.top().side)]) heap_.pop();
  const auto& best = heap_.top();
  return {best.edge, best.side, best.value};
}

}  // namespace emp
