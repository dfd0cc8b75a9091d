#include "sdm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdm/error.hpp"
#include "sdm/kernels.hpp"

namespace sdm {

Vec matvec(const Tensor& w, std::span<const double> v) {
  if (w.rank() != 2 || w.cols() != v.size()) {
    throw ContractError("matvec: matrix " + shape_string(w.shape()) + " vs vector [" +
                        std::to_string(v.size()) + "]");
  }
  const auto& k = simd::active();
  Vec out(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    out[i] = k.dot(w.row(i).data(), v.data(), v.size());
  }
  return out;
}

Vec matvec_transposed(const Tensor& w, std::span<const double> v) {
  if (w.rank() != 2 || w.rows() != v.size()) {
    throw ContractError("matvec_transposed: matrix " + shape_string(w.shape()) + " vs vector [" +
                        std::to_string(v.size()) + "]");
  }
  const auto& k = simd::active();
  Vec out(w.cols(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    if (v[i] != 0.0) k.axpy(v[i], w.row(i).data(), out.data(), out.size());
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("dot: lengths " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  return simd::active().dot(a.data(), b.data(), a.size());
}

SortedDesc sort_descending(std::span<const double> v) {
  if (v.empty()) throw ContractError("sort_descending: empty input");
  SortedDesc out;
  out.perm.resize(v.size());
  std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
  std::stable_sort(out.perm.begin(), out.perm.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  out.sorted.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.sorted[i] = v[out.perm[i]];
  return out;
}

std::size_t argmax_excluding(std::span<const double> v, std::size_t skip) {
  std::size_t best = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == skip) continue;
    if (best == v.size() || v[i] > v[best]) best = i;
  }
  if (best == v.size()) throw ContractError("argmax over an empty index set");
  return best;
}

std::size_t argmax(std::span<const double> v) { return argmax_excluding(v, v.size()); }

double norm_l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_linf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm(std::span<const double> v, Norm p) {
  return p == Norm::l2 ? norm_l2(v) : norm_linf(v);
}

Vec clamp(std::span<const double> v, double lo, double hi) {
  if (!(lo <= hi)) throw ContractError("clamp: lo > hi");
  Vec out(v.size());
  simd::active().clamp(v.data(), lo, hi, out.data(), v.size());
  return out;
}

Vec subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("subtract: length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace sdm
