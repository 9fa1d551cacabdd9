#pragma once

#include <vector>

#include "amtd/active_agents.hpp"

namespace amtd::detail {

ClassifierConfig classifier_config(const AgentConfig& cfg, bool discrete);

// Running totals over several update_on_batch calls.
struct DiagnosticsAccumulator {
  UpdateDiagnostics total;
  std::vector<double> branch_on;

  explicit DiagnosticsAccumulator(std::size_t l) : branch_on(l, 0.0) {
    total.branch_gate_on.assign(l, 0.0);
    total.branch_windows.assign(l, 0);
  }
  void add(const UpdateDiagnostics& d);
  UpdateDiagnostics finish();
};

// Gated target per window from bootstrap values listed branch-major; fills the gate statistics of `diag`.
Vector gated_targets(const BranchPlan& plan, const std::vector<GateVector>& gates, const Vector& bootstrap,
                     const ReturnWeights& weights, std::size_t l, UpdateDiagnostics& diag);

}  // namespace amtd::detail
