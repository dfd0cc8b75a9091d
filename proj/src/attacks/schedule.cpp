#include <array>
#include <sstream>

#include "sdm/attacks.hpp"
#include "sdm/error.hpp"

namespace sdm {

namespace {

constexpr std::array<std::pair<std::size_t, Schedule>, 7> kTable{{
    {10, {1, 5, 2}},
    {20, {1, 5, 4}},
    {50, {2, 5, 5}},
    {100, {2, 5, 10}},
    {200, {4, 5, 10}},
    {500, {4, 5, 25}},
    {1000, {5, 5, 40}},
}};

std::string table_options() {
  std::ostringstream os;
  for (std::size_t i = 0; i < kTable.size(); ++i) {
    const auto& [z, s] = kTable[i];
    if (i) os << ", ";
    os << z << "->(" << s.cycles << ',' << s.stages << ',' << s.steps << ')';
  }
  return os.str();
}

}  // namespace

std::span<const std::pair<std::size_t, Schedule>> schedule_table() { return kTable; }

Schedule schedule_for_total_steps(std::size_t total_steps) {
  for (const auto& [z, s] : kTable) {
    if (z == total_steps) return s;
  }
  throw ConfigError("no built-in SDM schedule for " + std::to_string(total_steps) +
                    " total steps; built-in totals are " + table_options() +
                    "; otherwise supply an explicit schedule C,N,T with C*N*T equal to the total");
}

std::string to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::fgsm:
      return "fgsm";
    case AttackMethod::pgd:
      return "pgd";
    case AttackMethod::margin_pgd:
      return "margin_pgd";
    case AttackMethod::sdm:
      return "sdm";
  }
  return "?";
}

std::string to_string(Norm n) { return n == Norm::linf ? "linf" : "l2"; }

std::string to_string(L2StepMode m) {
  return m == L2StepMode::normalized ? "normalized" : "paper_literal";
}

AttackMethod parse_method(const std::string& s) {
  if (s == "fgsm") return AttackMethod::fgsm;
  if (s == "pgd") return AttackMethod::pgd;
  if (s == "margin_pgd" || s == "cw") return AttackMethod::margin_pgd;
  if (s == "sdm") return AttackMethod::sdm;
  throw ConfigError("unknown attack method '" + s + "' (fgsm, pgd, margin_pgd, sdm)");
}

Norm parse_norm(const std::string& s) {
  if (s == "linf") return Norm::linf;
  if (s == "l2") return Norm::l2;
  throw ConfigError("unknown norm '" + s + "' (linf, l2)");
}

L2StepMode parse_l2_mode(const std::string& s) {
  if (s == "normalized") return L2StepMode::normalized;
  if (s == "paper_literal") return L2StepMode::paper_literal;
  throw ConfigError("unknown l2 step mode '" + s + "' (normalized, paper_literal)");
}

bool AttackConfig::uses_random_start() const {
  if (random_start) return *random_start;
  return method == AttackMethod::pgd || method == AttackMethod::margin_pgd;
}

void AttackConfig::validate(std::size_t num_classes) const {
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (norm == Norm::linf && epsilon > 1.0) throw ConfigError("l-inf epsilon must be <= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (total_steps == 0) throw ConfigError("total steps must be >= 1");
  if (!(zeta > 0.0)) throw ConfigError("zeta must be > 0");
  if (method == AttackMethod::sdm) resolved_schedule(num_classes);
}

Schedule AttackConfig::resolved_schedule(std::size_t num_classes) const {
  Schedule s;
  if (schedule) {
    s = *schedule;
    if (s.cycles == 0 || s.stages == 0 || s.steps == 0) {
      throw ConfigError("schedule entries must all be >= 1");
    }
    if (s.total() != total_steps) {
      throw ConfigError("schedule (" + std::to_string(s.cycles) + "," + std::to_string(s.stages) +
                        "," + std::to_string(s.steps) + ") gives " + std::to_string(s.total()) +
                        " steps, expected " + std::to_string(total_steps));
    }
  } else {
    s = schedule_for_total_steps(total_steps);
  }
  if (s.stages > num_classes) {
    throw ConfigError("SDM stage count N=" + std::to_string(s.stages) + " exceeds K=" +
                      std::to_string(num_classes) + "; supply a schedule with N <= K");
  }
  return s;
}

}  // namespace sdm
