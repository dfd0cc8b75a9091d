#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/evaluation.hpp"
#include "sdm/linalg.hpp"
#include "sdm/losses.hpp"
#include "sdm/mlp.hpp"

namespace sdm {

enum class AttackMethod { fgsm, pgd, margin_pgd, sdm };
enum class L2StepMode { normalized, paper_literal };

std::string to_string(AttackMethod m);
std::string to_string(Norm n);
std::string to_string(L2StepMode m);
AttackMethod parse_method(const std::string& s);
Norm parse_norm(const std::string& s);
L2StepMode parse_l2_mode(const std::string& s);

/// Cycles x stages x steps-per-stage.
struct Schedule {
  std::size_t cycles = 1;
  std::size_t stages = 1;
  std::size_t steps = 1;

  std::size_t total() const { return cycles * stages * steps; }
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Fixed mapping from total step budgets {10,...,1000} to (C, N, T).
Schedule schedule_for_total_steps(std::size_t total_steps);
std::span<const std::pair<std::size_t, Schedule>> schedule_table();

struct AttackConfig {
  AttackMethod method = AttackMethod::pgd;
  Norm norm = Norm::linf;
  double epsilon = 8.0 / 255.0;
  double alpha = 2.0 / 255.0;
  std::size_t total_steps = 10;
  std::optional<Schedule> schedule;
  // Unset means: on for pgd / margin_pgd, off for sdm.
  std::optional<bool> random_start;
  bool clamp01 = true;
  L2StepMode l2_step_mode = L2StepMode::normalized;
  std::uint64_t seed = 0;
  double zeta = kDefaultZeta;
  // Stop updating an example once it is misclassified.
  bool early_stop = false;
  bool record_trace = false;

  bool uses_random_start() const;
  /// Throws ConfigError for inconsistent settings given K classes.
  void validate(std::size_t num_classes) const;
  /// Explicit schedule if given (checked against total_steps), else table lookup.
  Schedule resolved_schedule(std::size_t num_classes) const;
};

/// Per-step record of which objective drove the update (indices are 1-based).
struct StepRecord {
  std::size_t cycle = 0;
  std::size_t stage = 0;
  std::size_t step = 0;
  LossKind loss;
};

struct AttackOutcome {
  Tensor adversarial;
  EvalReport report;
  // Gradient evaluations (forward + backward pairs) per example.
  std::size_t gradient_steps = 0;
  // Backward passes actually taken per example (differs only with early_stop).
  std::vector<std::size_t> steps_per_example;
  std::vector<StepRecord> trace;
  std::size_t tie_advisories = 0;

  std::vector<bool> success() const;
};

// --- projections -----------------------------------------------------------

Vec project_linf(std::span<const double> delta, double epsilon);

Vec step_linf(std::span<const double> x_nat, std::span<const double> x_prev,
              std::span<const double> grad, double alpha, double epsilon, bool clamp01);

/// grad / (||grad||_2 + zeta)
Vec normalize_grad_l2(std::span<const double> grad, double zeta = kDefaultZeta);

Vec step_l2(std::span<const double> x_nat, std::span<const double> x_prev,
            std::span<const double> grad, double alpha, double epsilon, L2StepMode mode,
            double zeta, bool clamp01);

// --- attacks ---------------------------------------------------------------

AttackOutcome fgsm(const MlpModel& model, const DatasetSplit& batch, double epsilon,
                   bool clamp01 = true);
AttackOutcome pgd(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg);
AttackOutcome margin_pgd(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg);
AttackOutcome sdm_attack(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg);

/// Dispatches on cfg.method.
AttackOutcome run_attack(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg);

/// Uniform start inside the budget ball for example `index`, stream-keyed on cfg.seed.
Vec random_start_point(std::span<const double> x_nat, Norm norm, double epsilon, bool clamp01,
                       std::uint64_t seed, std::uint64_t index);

}  // namespace sdm
