#include "sdm/timing.hpp"

#include <chrono>
#include <cmath>

#include "sdm/error.hpp"
#include "sdm/parallel.hpp"

namespace sdm {

namespace {

class ScopedThreads {
 public:
  explicit ScopedThreads(std::size_t n) : saved_(thread_count()) { set_thread_count(n); }
  ~ScopedThreads() { set_thread_count(saved_); }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  std::size_t saved_;
};

}  // namespace

std::vector<TimingRow> timing_bench(const MlpModel& model, const DatasetSplit& batch,
                                    const std::vector<AttackConfig>& methods, std::size_t repeats) {
  if (repeats < 3) throw ContractError("timing_bench needs repeats >= 3");
  ScopedThreads single(1);
  using clock = std::chrono::steady_clock;
  std::vector<TimingRow> rows;
  for (const auto& cfg : methods) {
    TimingRow row;
    row.method = to_string(cfg.method);
    run_attack(model, batch, cfg);  // warm-up
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto t0 = clock::now();
      const auto outcome = run_attack(model, batch, cfg);
      const auto t1 = clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      const std::size_t steps = std::max<std::size_t>(outcome.gradient_steps, 1);
      row.samples_ms.push_back(ms / static_cast<double>(steps));
    }
    double sum = 0.0;
    for (double v : row.samples_ms) sum += v;
    row.mean_ms = sum / static_cast<double>(repeats);
    double var = 0.0;
    for (double v : row.samples_ms) var += (v - row.mean_ms) * (v - row.mean_ms);
    row.std_ms = std::sqrt(var / static_cast<double>(repeats - 1));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sdm
