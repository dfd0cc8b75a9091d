#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdm/attacks.hpp"

namespace sdm {

struct TimingRow {
  std::string method;
  double mean_ms = 0.0;  // per gradient step
  double std_ms = 0.0;
  std::vector<double> samples_ms;
};

/// Wall-clock per step (total loop time / Z) per method, one warm-up run
/// excluded, single-threaded. repeats >= 3.
std::vector<TimingRow> timing_bench(const MlpModel& model, const DatasetSplit& batch,
                                    const std::vector<AttackConfig>& methods, std::size_t repeats);

}  // namespace sdm
