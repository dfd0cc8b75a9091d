#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdm/mlp.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

struct PcaResult {
  Tensor coords;      // m x 2
  Tensor components;  // 2 x d, orthonormal rows
  Vec mean;           // d
  std::array<double, 2> eigenvalues{};
};

/// Top-2 principal components by power iteration with deflation. The
/// largest-magnitude coordinate of each component is made positive.
/// Throws DegenerateSubspaceError when the second eigenvalue vanishes.
PcaResult pca_2d(const Tensor& samples);

struct IdwOptions {
  double power = 2.0;
  std::size_t neighbors = 16;
};

/// Inverse-distance-weighted estimate at (qx, qy) from the nearest neighbours;
/// a query coinciding with a sample returns that sample's value.
double idw_interpolate(const Tensor& points, std::span<const double> values, double qx, double qy,
                       const IdwOptions& opts = {});

struct LandscapeGrid {
  std::size_t resolution = 0;
  Tensor sample_coords;  // m x 2
  Vec sample_p_y;
  Vec sample_p_diff;     // P_y - P_tau
  Vec grid_x;            // resolution node abscissae
  Vec grid_y;            // resolution node ordinates
  Tensor p_y;            // resolution x resolution, [row = y index][col = x index]
  Tensor p_diff;
};

struct LandscapeOptions {
  std::size_t samples = 500;
  std::size_t resolution = 64;
  std::uint64_t seed = 0;
  IdwOptions idw;
};

/// Uniform l-inf perturbations around x, projected to 2D by PCA and
/// interpolated onto a regular grid over the coordinate bounding box.
LandscapeGrid landscape(const MlpModel& model, std::span<const double> x, std::size_t y,
                        double epsilon, const LandscapeOptions& opts);

}  // namespace sdm
