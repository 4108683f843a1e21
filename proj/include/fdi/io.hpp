#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdi/fuzzy.hpp"
#include "fdi/harness.hpp"
#include "fdi/plant.hpp"
#include "fdi/residuals.hpp"
#include "fdi/tuner.hpp"

namespace fdi {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Parses JSON text; syntax errors become ConfigError "<source>:<line>:<col>: ...".
Json parse_json(std::string_view text, std::string_view source = "<input>");

std::string read_file(const std::filesystem::path& path);
// Writes the whole content at once; creates missing parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

// Converters. The *_from_json functions reject unknown keys and report the
// offending field by its JSON path.
Json to_json(const FaultEvent& e);
Json to_json(const FaultScenario& s);
Json suite_to_json(const std::vector<FaultScenario>& suite);
Json to_json(const PlantParams& p);
Json to_json(const DetectorConfig& cfg);
Json to_json(const PsoParams& p);
Json to_json(const GaParams& p);
Json to_json(const SuiteSpec& s);
Json to_json(const DetectionReport& r);

FaultScenario scenario_from_json(const Json& j, const std::string& path = "scenario");
// Accepts a suite object {"schema":1,"scenarios":[...]} or a single scenario.
std::vector<FaultScenario> suite_from_json(const Json& j);
PlantParams plant_from_json(const Json& j);
DetectorConfig detector_from_json(const Json& j);
// Missing keys keep the values already in `base`.
PsoParams pso_from_json(const Json& j, PsoParams base = {});
GaParams ga_from_json(const Json& j, GaParams base = {});
SuiteSpec suite_spec_from_json(const Json& j, SuiteSpec base = {});

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

std::string trace_csv(const Trace& trace);
std::string residual_csv(const ResidualTrace& residuals);
std::string history_csv(const std::vector<HistoryRow>& history);
std::string reports_jsonl(const std::vector<DetectionReport>& reports);

}  // namespace fdi
