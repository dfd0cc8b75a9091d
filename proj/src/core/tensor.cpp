#include "sdm/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "sdm/error.hpp"

namespace sdm {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_shape(const std::vector<std::size_t>& shape) {
  for (auto e : shape) {
    if (e == 0) throw ContractError("tensor extents must be positive, got " + shape_string(shape));
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, Vec data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != product(shape_)) {
    throw ContractError("tensor data length " + std::to_string(data_.size()) +
                        " does not match shape " + shape_string(shape_));
  }
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ContractError("axis " + std::to_string(axis) + " out of range for shape " +
                        shape_string(shape_));
  }
  return shape_[axis];
}

std::span<double> Tensor::row(std::size_t i) {
  const auto c = cols();
  if (i >= rows()) throw ContractError("row index out of range");
  return {data_.data() + i * c, c};
}

std::span<const double> Tensor::row(std::size_t i) const {
  const auto c = cols();
  if (i >= rows()) throw ContractError("row index out of range");
  return {data_.data() + i * c, c};
}

bool Tensor::all_finite() const { return sdm::all_finite(data_); }

void Tensor::require_finite(const std::string& what) const {
  if (!all_finite()) throw NumericError(what + " contains non-finite values");
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace sdm
