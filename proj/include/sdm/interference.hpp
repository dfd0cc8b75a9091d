#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdm/attacks.hpp"
#include "sdm/mlp.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

enum class InterferenceKind { hflip, translate, uniform_noise, gaussian_noise };

std::string to_string(InterferenceKind k);

/// Post-hoc transforms applied to adversarial examples before classification.
struct InterferenceSpec {
  InterferenceKind kind = InterferenceKind::hflip;
  double translate_fraction = 0.125;
  double uniform_low = -0.15;
  double uniform_high = 0.15;
  double gaussian_mean = 0.0;
  double gaussian_std = 0.05;
  std::uint64_t seed = 0;
};

/// Channels x height x width layout of a flat input vector.
struct GridShape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t size() const { return channels * height * width; }
  bool spatial() const { return height > 1 && width > 1; }
};

enum class ShiftDirection { up, down, left, right };

/// Pixels shifted by `translate` for an image of the given extent.
std::size_t translate_pixels(std::size_t extent, double fraction);

Vec hflip(std::span<const double> x, const GridShape& grid);
/// Zero-filled shift by `pixels` toward `dir`.
Vec translate(std::span<const double> x, const GridShape& grid, ShiftDirection dir,
              std::size_t pixels);

/// Row i uses RNG stream i, so results do not depend on batch partitioning.
/// Spatial kinds need a spatial grid whose size equals the input dimension.
Tensor apply_interference(const Tensor& inputs, const InterferenceSpec& spec,
                          const std::optional<GridShape>& grid);

struct InterferenceRow {
  std::string method;
  std::uint64_t seed = 0;
  // raw, hflip, translate, uniform noise, gaussian noise
  std::array<double, 5> asr{};

  double worst_case() const;  // minimum over the four interference columns
};

inline constexpr std::array<const char*, 5> kInterferenceColumns{"raw", "hflip", "translate", "UN",
                                                                 "GN"};

InterferenceRow interference_suite(const MlpModel& model, const std::string& method,
                                   const Tensor& adversarial, std::span<const std::uint32_t> labels,
                                   const GridShape& grid, std::uint64_t seed);

}  // namespace sdm
