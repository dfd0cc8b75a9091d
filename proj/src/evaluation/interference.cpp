#include "sdm/interference.hpp"

#include <algorithm>
#include <cmath>

#include "sdm/error.hpp"
#include "sdm/evaluation.hpp"
#include "sdm/parallel.hpp"
#include "sdm/rng.hpp"

namespace sdm {

std::string to_string(InterferenceKind k) {
  switch (k) {
    case InterferenceKind::hflip:
      return "hflip";
    case InterferenceKind::translate:
      return "translate";
    case InterferenceKind::uniform_noise:
      return "uniform_noise";
    case InterferenceKind::gaussian_noise:
      return "gaussian_noise";
  }
  return "?";
}

std::size_t translate_pixels(std::size_t extent, double fraction) {
  return static_cast<std::size_t>(std::lround(fraction * static_cast<double>(extent)));
}

namespace {

void check_grid(std::size_t n, const GridShape& grid) {
  if (!grid.spatial() || grid.size() != n) {
    throw ContractError("spatial interference needs a C x H x W grid (H, W > 1) matching the input "
                        "length " + std::to_string(n));
  }
}

}  // namespace

Vec hflip(std::span<const double> x, const GridShape& grid) {
  check_grid(x.size(), grid);
  Vec out(x.size());
  for (std::size_t c = 0; c < grid.channels; ++c) {
    for (std::size_t h = 0; h < grid.height; ++h) {
      const std::size_t base = (c * grid.height + h) * grid.width;
      for (std::size_t w = 0; w < grid.width; ++w) {
        out[base + w] = x[base + grid.width - 1 - w];
      }
    }
  }
  return out;
}

Vec translate(std::span<const double> x, const GridShape& grid, ShiftDirection dir,
              std::size_t pixels) {
  check_grid(x.size(), grid);
  Vec out(x.size(), 0.0);
  const auto H = static_cast<std::ptrdiff_t>(grid.height);
  const auto W = static_cast<std::ptrdiff_t>(grid.width);
  const auto p = static_cast<std::ptrdiff_t>(pixels);
  std::ptrdiff_t dh = 0;
  std::ptrdiff_t dw = 0;
  switch (dir) {
    case ShiftDirection::up:
      dh = -p;
      break;
    case ShiftDirection::down:
      dh = p;
      break;
    case ShiftDirection::left:
      dw = -p;
      break;
    case ShiftDirection::right:
      dw = p;
      break;
  }
  for (std::size_t c = 0; c < grid.channels; ++c) {
    const auto plane = static_cast<std::ptrdiff_t>(c) * H * W;
    for (std::ptrdiff_t h = 0; h < H; ++h) {
      const std::ptrdiff_t src_h = h - dh;
      if (src_h < 0 || src_h >= H) continue;
      for (std::ptrdiff_t w = 0; w < W; ++w) {
        const std::ptrdiff_t src_w = w - dw;
        if (src_w < 0 || src_w >= W) continue;
        out[static_cast<std::size_t>(plane + h * W + w)] =
            x[static_cast<std::size_t>(plane + src_h * W + src_w)];
      }
    }
  }
  return out;
}

Tensor apply_interference(const Tensor& inputs, const InterferenceSpec& spec,
                          const std::optional<GridShape>& grid) {
  const bool spatial =
      spec.kind == InterferenceKind::hflip || spec.kind == InterferenceKind::translate;
  if (spatial) {
    if (!grid) throw ContractError(to_string(spec.kind) + " needs a spatial grid shape");
    check_grid(inputs.cols(), *grid);
  }
  Tensor out = inputs;
  parallel_for(inputs.rows(), [&](std::size_t i) {
    const auto x = inputs.row(i);
    auto dst = out.row(i);
    SeededRng rng(spec.seed, i);
    Vec y;
    switch (spec.kind) {
      case InterferenceKind::hflip:
        y = hflip(x, *grid);
        break;
      case InterferenceKind::translate: {
        const auto dir = static_cast<ShiftDirection>(rng.below(4));
        const bool vertical = dir == ShiftDirection::up || dir == ShiftDirection::down;
        const auto px =
            translate_pixels(vertical ? grid->height : grid->width, spec.translate_fraction);
        y = translate(x, *grid, dir, px);
        break;
      }
      case InterferenceKind::uniform_noise:
        y.assign(x.begin(), x.end());
        for (double& v : y) v += rng.uniform(spec.uniform_low, spec.uniform_high);
        break;
      case InterferenceKind::gaussian_noise:
        y.assign(x.begin(), x.end());
        for (double& v : y) v += spec.gaussian_mean + spec.gaussian_std * rng.normal();
        break;
    }
    for (std::size_t j = 0; j < y.size(); ++j) dst[j] = std::clamp(y[j], 0.0, 1.0);
  });
  return out;
}

double InterferenceRow::worst_case() const {
  return std::min({asr[1], asr[2], asr[3], asr[4]});
}

InterferenceRow interference_suite(const MlpModel& model, const std::string& method,
                                   const Tensor& adversarial, std::span<const std::uint32_t> labels,
                                   const GridShape& grid, std::uint64_t seed) {
  InterferenceRow row;
  row.method = method;
  row.seed = seed;
  row.asr[0] = evaluate(model, adversarial, labels).attack_success_rate;
  const InterferenceKind kinds[] = {InterferenceKind::hflip, InterferenceKind::translate,
                                    InterferenceKind::uniform_noise,
                                    InterferenceKind::gaussian_noise};
  for (std::size_t k = 0; k < 4; ++k) {
    InterferenceSpec spec;
    spec.kind = kinds[k];
    spec.seed = seed;
    const Tensor perturbed = apply_interference(adversarial, spec, grid);
    row.asr[k + 1] = evaluate(model, perturbed, labels).attack_success_rate;
  }
  return row;
}

}  // namespace sdm
