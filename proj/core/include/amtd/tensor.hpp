#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace amtd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Row-major dense array of doubles with a fixed shape.
/// Construction rejects non-finite entries and shapes that do not match the data length.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor vector(std::vector<double> data);
  static Tensor zeros(std::vector<std::size_t> shape);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  std::size_t size() const { return data_.size(); }
  std::size_t rank() const { return shape_.size(); }

  double operator[](std::size_t i) const { return data_[i]; }

  // Rank-1 tensors become a single column; rank-2 [batch, features] become features x batch.
  Matrix to_columns() const;
  static Tensor from_columns(const Matrix& m);

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

bool all_finite(std::span<const double> values);

}  // namespace amtd
