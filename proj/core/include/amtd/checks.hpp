#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "amtd/nn.hpp"

namespace amtd {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose one-sided slopes disagree (a relu kink inside +-h)
};

// Compares backward() of L = sum(weights .* forward(x)) with central differences of step h.
GradientCheckResult check_gradients(const Network& net, const Matrix& x, const Matrix& weights, double h = 1e-5);

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<std::string> check_suites();
// Runs one suite by name, or every suite for "all".
std::vector<CheckResult> run_checks(const std::string& suite, std::uint64_t seed = 0);

}  // namespace amtd
