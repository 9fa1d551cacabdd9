#include "amtd/optim.hpp"

#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/tensor.hpp"

namespace amtd {

std::string to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw UsageError("unknown optimizer '" + s + "'");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be positive");
  }
  if (kind_ == OptimizerKind::adam) {
    first_.assign(num_params, 0.0);
    second_.assign(num_params, 0.0);
  } else {
    first_.assign(num_params, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != first_.size() || grad.size() != params.size()) {
    throw DimensionError("optimizer state, parameter and gradient lengths differ");
  }
  if (!all_finite(grad)) throw NumericError("non-finite gradient entry");
  ++steps_;
  if (kind_ == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    first_[i] = beta1 * first_[i] + (1.0 - beta1) * grad[i];
    second_[i] = beta2 * second_[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = first_[i] / c1;
    const double v_hat = second_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

}  // namespace amtd
