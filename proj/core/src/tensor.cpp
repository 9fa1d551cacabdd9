#include "amtd/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "amtd/errors.hpp"

namespace amtd {

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw DimensionError("tensor shape must have at least one dimension");
  std::size_t n = 1;
  for (std::size_t d : shape_) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
    n *= d;
  }
  if (n != data_.size()) {
    throw DimensionError("tensor shape implies " + std::to_string(n) + " entries, got " +
                         std::to_string(data_.size()));
  }
  if (!all_finite(data_)) throw NumericError("tensor contains a non-finite entry");
}

Tensor Tensor::vector(std::vector<double> data) {
  const std::size_t n = data.size();
  return Tensor({n}, std::move(data));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Matrix Tensor::to_columns() const {
  if (rank() == 1) {
    return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()));
  }
  if (rank() != 2) throw DimensionError("only rank-1 and rank-2 tensors map onto network inputs");
  const auto rows = static_cast<Eigen::Index>(shape_[0]);
  const auto cols = static_cast<Eigen::Index>(shape_[1]);
  // Row-major [batch, features] is column-major [features, batch].
  return Eigen::Map<const Matrix>(data_.data(), cols, rows);
}

Tensor Tensor::from_columns(const Matrix& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  if (m.cols() == 1) return Tensor::vector(std::move(data));
  return Tensor({static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows())},
                std::move(data));
}

}  // namespace amtd
