#include "sdm/report_io.hpp"

#include <iomanip>
#include <sstream>
#include <string>

#include "sdm/error.hpp"

namespace sdm {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ExampleRecord& r) {
  return json{{"index", r.index},         {"success", r.success},     {"ce_loss", r.ce_loss},
              {"p_y", r.p_y},             {"p_tau", r.p_tau},         {"linf_norm", r.linf_norm},
              {"l2_norm", r.l2_norm}};
}

json aggregate_json(const EvalReport& report) {
  std::size_t successes = 0;
  for (const auto& r : report.records) successes += r.success ? 1 : 0;
  return json{{"n", report.records.size()},
              {"successes", successes},
              {"attack_success_rate", report.attack_success_rate},
              {"mean_ce_loss", report.mean_ce_loss}};
}

json to_json(const SetComparison& cmp) {
  json pairs = json::array();
  for (const auto& p : cmp.pairs) {
    pairs.push_back(json{{"a", p.a},
                         {"b", p.b},
                         {"intersection", p.intersection},
                         {"a_minus_b", p.a_minus_b},
                         {"b_minus_a", p.b_minus_a},
                         {"count_intersection", p.count_intersection},
                         {"count_a_minus_b", p.count_a_minus_b},
                         {"count_b_minus_a", p.count_b_minus_a}});
  }
  return json{{"n", cmp.n}, {"methods", cmp.methods}, {"pairs", pairs}};
}

json to_json(const HighLossResult& r) {
  return json{{"h_count", r.h_count},
              {"mean_l1", optional_json(r.mean_l1)},
              {"sdm_fail_count", r.sdm_fail_count},
              {"mean_l2", optional_json(r.mean_l2)}};
}

json to_json(const InterferenceRow& row) {
  json j{{"method", row.method}, {"seed", row.seed}};
  for (std::size_t i = 0; i < kInterferenceColumns.size(); ++i) j[kInterferenceColumns[i]] = row.asr[i];
  j["worst_case"] = row.worst_case();
  return j;
}

json to_json(const TimingRow& row) {
  return json{{"method", row.method},
              {"mean_ms_per_step", row.mean_ms},
              {"std_ms_per_step", row.std_ms},
              {"samples_ms", row.samples_ms}};
}

void write_report_jsonl(std::ostream& os, const EvalReport& report, const json& extra_aggregate) {
  for (const auto& r : report.records) os << to_json(r).dump() << '\n';
  json agg = aggregate_json(report);
  for (const auto& [k, v] : extra_aggregate.items()) agg[k] = v;
  os << json{{"aggregate", agg}}.dump() << '\n';
}

EvalReport read_report_jsonl(std::istream& is) {
  EvalReport report;
  std::string line;
  bool footer = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("aggregate")) {
        const auto& a = j.at("aggregate");
        report.attack_success_rate = a.at("attack_success_rate").get<double>();
        report.mean_ce_loss = a.at("mean_ce_loss").get<double>();
        footer = true;
        continue;
      }
      ExampleRecord r;
      r.index = j.at("index").get<std::size_t>();
      r.success = j.at("success").get<bool>();
      r.ce_loss = j.at("ce_loss").get<double>();
      r.p_y = j.at("p_y").get<double>();
      r.p_tau = j.at("p_tau").get<double>();
      r.linf_norm = j.at("linf_norm").get<double>();
      r.l2_norm = j.at("l2_norm").get<double>();
      report.records.push_back(r);
    } catch (const json::exception& e) {
      throw FormatError("report line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!footer) throw FormatError("report has no aggregate footer");
  return report;
}

void write_comparison_jsonl(std::ostream& os, const SetComparison& cmp,
                            const json& extra_aggregate) {
  const json j = to_json(cmp);
  for (const auto& p : j["pairs"]) os << p.dump() << '\n';
  json agg{{"n", cmp.n}, {"methods", cmp.methods}};
  for (const auto& [k, v] : extra_aggregate.items()) agg[k] = v;
  os << json{{"aggregate", agg}}.dump() << '\n';
}

void write_landscape_csv(std::ostream& os, const LandscapeGrid& grid) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "px,py,p_y,p_diff\n";
  for (std::size_t row = 0; row < grid.resolution; ++row) {
    for (std::size_t col = 0; col < grid.resolution; ++col) {
      buf << grid.grid_x[col] << ',' << grid.grid_y[row] << ',' << grid.p_y.at(row, col) << ','
          << grid.p_diff.at(row, col) << '\n';
    }
  }
  os << buf.str();
}

}  // namespace sdm
