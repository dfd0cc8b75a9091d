#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sdm/evaluation.hpp"
#include "sdm/interference.hpp"
#include "sdm/landscape.hpp"
#include "sdm/timing.hpp"

#include <json.hpp>

namespace sdm {

nlohmann::json to_json(const ExampleRecord& r);
nlohmann::json aggregate_json(const EvalReport& report);
nlohmann::json to_json(const SetComparison& cmp);
nlohmann::json to_json(const HighLossResult& r);
nlohmann::json to_json(const InterferenceRow& row);
nlohmann::json to_json(const TimingRow& row);

/// One JSON object per example, then {"aggregate": {...}}.
void write_report_jsonl(std::ostream& os, const EvalReport& report,
                        const nlohmann::json& extra_aggregate = nlohmann::json::object());

/// Parses the format written by write_report_jsonl.
EvalReport read_report_jsonl(std::istream& is);

/// One pair record per line, then {"aggregate": {...}}.
void write_comparison_jsonl(std::ostream& os, const SetComparison& cmp,
                            const nlohmann::json& extra_aggregate = nlohmann::json::object());

/// Header `px,py,p_y,p_diff`, one row per grid node.
void write_landscape_csv(std::ostream& os, const LandscapeGrid& grid);

}  // namespace sdm
