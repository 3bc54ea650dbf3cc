#pragma once

#include <cstddef>

#include "emp/model.hpp"
#include "emp/projections.hpp"

namespace emp {

// L(lambda, xi) split into the part that moves with the duals and the constant
// sum exp(-eta C). The constant is astronomically large for large eta, so
// differences of L are always taken on `variable`.
struct LyapunovValue {
  double variable = 0.0;
  double constant = 0.0;

  double total() const noexcept { return variable + constant; }
};

/// Full evaluation from the dual variables alone (the stored log-marginals are
/// not consulted). Exponential sums go through log-sum-exp.
LyapunovValue evaluate_lyapunov(const Model& model, double eta, const DualState& dual);

double lyapunov(const Model& model, double eta, const DualState& dual);

/// sum over all vertex and edge entries of exp(-eta C); +inf on overflow.
double lyapunov_constant(const Model& model, double eta);

// Per-block pieces of the variable part: a block contributes -(exp mass) - xi.
// Summing every edge and vertex term gives LyapunovValue::variable.
struct LyapunovTerm {
  double mass = 0.0;
  double xi = 0.0;

  double value() const noexcept { return -mass - xi; }
};

LyapunovTerm lyapunov_edge_term(const Model& model, double eta, const DualState& dual, std::size_t e);
LyapunovTerm lyapunov_vertex_term(const Model& model, double eta, const DualState& dual,
                                  std::size_t v);

}  // namespace emp
