#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sdm {

using Vec = std::vector<double>;

/// Dense row-major float64 array with an explicit shape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, Vec data);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const;

  // Matrix view helpers; valid for rank-2 tensors.
  std::size_t rows() const { return extent(0); }
  std::size_t cols() const { return extent(1); }
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

  bool all_finite() const;
  /// Throws NumericError naming `what` if any element is NaN/Inf.
  void require_finite(const std::string& what) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  Vec data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

bool all_finite(std::span<const double> v);

}  // namespace sdm
