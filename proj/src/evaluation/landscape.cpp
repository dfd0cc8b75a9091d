#include "sdm/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdm/error.hpp"
#include "sdm/linalg.hpp"
#include "sdm/parallel.hpp"
#include "sdm/probability.hpp"
#include "sdm/rng.hpp"

namespace sdm {

double idw_interpolate(const Tensor& points, std::span<const double> values, double qx, double qy,
                       const IdwOptions& opts) {
  const std::size_t m = points.rows();
  if (m == 0 || values.size() != m) throw ContractError("idw_interpolate: bad sample set");
  std::vector<std::pair<double, std::size_t>> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = points.at(i, 0) - qx;
    const double dy = points.at(i, 1) - qy;
    dist[i] = {std::sqrt(dx * dx + dy * dy), i};
  }
  const std::size_t k = std::min(opts.neighbors, m);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  if (dist[0].first < 1e-12) return values[dist[0].second];
  double wsum = 0.0;
  double vsum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double w = 1.0 / std::pow(dist[j].first, opts.power);
    wsum += w;
    vsum += w * values[dist[j].second];
  }
  return vsum / wsum;
}

LandscapeGrid landscape(const MlpModel& model, std::span<const double> x, std::size_t y,
                        double epsilon, const LandscapeOptions& opts) {
  if (opts.samples < 50) throw ContractError("landscape needs at least 50 samples");
  if (opts.resolution < 8) throw ContractError("landscape needs grid resolution >= 8");
  if (!(epsilon >= 0.0)) throw ContractError("landscape: negative epsilon");
  if (y >= model.num_classes()) throw ContractError("landscape: label out of range");

  const std::size_t m = opts.samples;
  const std::size_t d = x.size();
  Tensor deltas = Tensor::matrix(m, d);
  LandscapeGrid grid;
  grid.resolution = opts.resolution;
  grid.sample_p_y.resize(m);
  grid.sample_p_diff.resize(m);

  parallel_for(m, [&](std::size_t i) {
    SeededRng rng(opts.seed, i);
    Vec xp(x.begin(), x.end());
    auto delta = deltas.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      xp[j] = std::clamp(x[j] + rng.uniform(-epsilon, epsilon), 0.0, 1.0);
      delta[j] = xp[j] - x[j];
    }
    const auto p = softmax(model.forward(xp));
    const double p_tau = p[argmax_excluding(p.values(), y)];
    grid.sample_p_y[i] = p[y];
    grid.sample_p_diff[i] = p[y] - p_tau;
  });

  const PcaResult pca = pca_2d(deltas);
  grid.sample_coords = pca.coords;

  double min_x = pca.coords.at(0, 0), max_x = min_x;
  double min_y = pca.coords.at(0, 1), max_y = min_y;
  for (std::size_t i = 1; i < m; ++i) {
    min_x = std::min(min_x, pca.coords.at(i, 0));
    max_x = std::max(max_x, pca.coords.at(i, 0));
    min_y = std::min(min_y, pca.coords.at(i, 1));
    max_y = std::max(max_y, pca.coords.at(i, 1));
  }
  const std::size_t r = opts.resolution;
  grid.grid_x.resize(r);
  grid.grid_y.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(r - 1);
    grid.grid_x[i] = min_x + t * (max_x - min_x);
    grid.grid_y[i] = min_y + t * (max_y - min_y);
  }
  grid.p_y = Tensor::matrix(r, r);
  grid.p_diff = Tensor::matrix(r, r);
  parallel_for(r * r, [&](std::size_t node) {
    const std::size_t row = node / r;
    const std::size_t col = node % r;
    grid.p_y.at(row, col) =
        idw_interpolate(pca.coords, grid.sample_p_y, grid.grid_x[col], grid.grid_y[row], opts.idw);
    grid.p_diff.at(row, col) = idw_interpolate(pca.coords, grid.sample_p_diff, grid.grid_x[col],
                                               grid.grid_y[row], opts.idw);
  });
  return grid;
}

}  // namespace sdm
