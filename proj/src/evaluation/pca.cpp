#include <algorithm>
#include <cmath>
#include <limits>

#include "sdm/error.hpp"
#include "sdm/landscape.hpp"
#include "sdm/linalg.hpp"

namespace sdm {

namespace {

constexpr double kTolerance = 1e-10;
constexpr std::size_t kMaxIterations = 10000;

// Dominant eigenpair of a symmetric PSD matrix; `against` lists unit vectors
// the iterate is kept orthogonal to.
std::pair<double, Vec> power_iteration(const Tensor& cov, const std::vector<Vec>& against) {
  const std::size_t d = cov.rows();
  std::size_t start = 0;
  for (std::size_t j = 1; j < d; ++j) {
    if (cov.at(j, j) > cov.at(start, start)) start = j;
  }
  Vec v(cov.row(start).begin(), cov.row(start).end());
  auto orthonormalize = [&](Vec& u) {
    for (const auto& a : against) {
      const double proj = dot(u, a);
      for (std::size_t i = 0; i < d; ++i) u[i] -= proj * a[i];
    }
    const double len = norm_l2(u);
    if (len == 0.0) return false;
    for (double& x : u) x /= len;
    return true;
  };
  if (!orthonormalize(v)) return {0.0, Vec(d, 0.0)};

  // The remaining eigenvector error is about step * rate / (1 - rate), where
  // rate = l2/l1 is estimated from successive steps. Stop when that estimate
  // is below the tolerance or the steps stop shrinking (round-off floor).
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    Vec next = matvec(cov, v);
    if (!orthonormalize(next)) return {0.0, v};
    double diff = 0.0;
    for (std::size_t i = 0; i < d; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
    v = std::move(next);
    const double rate = diff / prev;
    if (rate >= 1.0 && diff < kTolerance) break;
    if (it > 0 && rate < 1.0 && diff * rate / (1.0 - rate) < kTolerance) break;
    prev = diff;
  }
  const Vec cv = matvec(cov, v);
  return {dot(v, cv), v};
}

void fix_sign(Vec& v) {
  std::size_t big = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  }
  if (v[big] < 0.0) {
    for (double& x : v) x = -x;
  }
}

}  // namespace

PcaResult pca_2d(const Tensor& samples) {
  if (samples.rank() != 2 || samples.rows() < 3 || samples.cols() < 2) {
    throw ContractError("pca_2d needs an m x d matrix with m >= 3, d >= 2");
  }
  const std::size_t m = samples.rows();
  const std::size_t d = samples.cols();
  PcaResult out;
  out.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += samples.at(i, j);
  }
  for (double& v : out.mean) v /= static_cast<double>(m);

  Tensor centered = samples;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered.at(i, j) -= out.mean[j];
  }
  Tensor cov = Tensor::matrix(d, d);
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = centered.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) cov.at(a, b) += r[a] * r[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov.at(a, b) /= static_cast<double>(m - 1);
      cov.at(b, a) = cov.at(a, b);
    }
  }

  auto [lambda1, v1] = power_iteration(cov, {});
  if (!(lambda1 > 0.0)) throw DegenerateSubspaceError("pca_2d: samples have zero variance");
  // Deflate, then iterate again orthogonally to the first component.
  Tensor deflated = cov;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) deflated.at(a, b) -= lambda1 * v1[a] * v1[b];
  }
  auto [lambda2, v2] = power_iteration(deflated, {v1});
  if (!(lambda2 > 1e-12 * lambda1)) {
    throw DegenerateSubspaceError("pca_2d: samples span fewer than two dimensions");
  }
  fix_sign(v1);
  fix_sign(v2);
  out.eigenvalues = {lambda1, lambda2};

  Vec comps(2 * d);
  std::copy(v1.begin(), v1.end(), comps.begin());
  std::copy(v2.begin(), v2.end(), comps.begin() + static_cast<std::ptrdiff_t>(d));
  out.components = Tensor({2, d}, std::move(comps));
  out.coords = Tensor::matrix(m, 2);
  for (std::size_t i = 0; i < m; ++i) {
    out.coords.at(i, 0) = dot(centered.row(i), v1);
    out.coords.at(i, 1) = dot(centered.row(i), v2);
  }
  return out;
}

}  // namespace sdm
