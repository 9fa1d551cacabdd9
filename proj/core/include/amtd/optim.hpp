#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace amtd {

enum class OptimizerKind { sgd, adam };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

/// First-order optimizer state for one flat parameter vector.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params);

  // Descends along `grad`; throws NumericError on a non-finite gradient entry.
  void step(std::span<double> params, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  std::uint64_t step_count() const { return steps_; }
  std::size_t size() const { return first_.size(); }

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

 private:
  OptimizerKind kind_ = OptimizerKind::adam;
  double lr_ = 1e-3;
  std::uint64_t steps_ = 0;
  std::vector<double> first_;
  std::vector<double> second_;
};

}  // namespace amtd
