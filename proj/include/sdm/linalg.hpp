#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdm/tensor.hpp"

namespace sdm {

enum class Norm { linf, l2 };

/// W [m x n] times v [n].
Vec matvec(const Tensor& w, std::span<const double> v);
/// W^T [n x m] times v [m].
Vec matvec_transposed(const Tensor& w, std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

struct SortedDesc {
  Vec sorted;
  std::vector<std::size_t> perm;  // sorted[i] == v[perm[i]]
};

/// Stable descending sort; ties keep the smaller original index first.
SortedDesc sort_descending(std::span<const double> v);

/// Stable argmax over all indices except `skip` (pass v.size() to skip none).
std::size_t argmax_excluding(std::span<const double> v, std::size_t skip);
std::size_t argmax(std::span<const double> v);

double norm(std::span<const double> v, Norm p);
double norm_l2(std::span<const double> v);
double norm_linf(std::span<const double> v);

Vec clamp(std::span<const double> v, double lo, double hi);

Vec subtract(std::span<const double> a, std::span<const double> b);

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace sdm
