#pragma once

// Declarative experiment configs, the pipeline runner and report emitters.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ellis/spaces.hpp"

namespace ellis {

inline constexpr const char* kToolName = "ellis";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "ellis-experiment/1";
inline constexpr const char* kReportSchema = "ellis-report/1";

struct PipelineStep {
  std::string op;
  std::string id;
  Json params = Json::object();
  Json expect = Json::object();  // dotted path into the result -> expected value
};

struct ExperimentConfig {
  Json source;  // the config as written, echoed into the report
  std::string name;
  Json model;   // {catalog, params} | {file} | {finite_map} | {shift} | {semigroup} | null
  std::uint64_t seed = 1;
  std::vector<PipelineStep> pipeline;
  std::filesystem::path output_dir;
  std::vector<std::string> formats{"json"};
  std::filesystem::path base_dir;  // relative file references resolve here
};

/// Validates structure, op names and parameter types; throws invalid-config.
ExperimentConfig parse_config(const Json& j, std::filesystem::path base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Operation names accepted in a pipeline, sorted.
std::vector<std::string> operation_names();

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Report {
  Json document;  // deterministic part, written as report.json
  Json timings;   // wall-clock seconds per step, written separately
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, std::string>> text_blocks;  // step id, rendered block
  std::size_t step_errors = 0;
  std::size_t verdict_failures = 0;

  /// 0 all held, 2 verdict failures, 1 execution errors.
  int exit_code() const noexcept { return step_errors ? 1 : verdict_failures ? 2 : 0; }
};

/// Runs the pipeline in order. Step failures are recorded and later steps still run;
/// steps whose inputs were never produced fail with a dependency error.
Report run_experiment(const ExperimentConfig& config);

/// Writes report.json / timings.json (json), <step>.csv (csv) and report.txt (text).
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& dir,
                                               const std::vector<std::string>& formats);

std::string render_csv(const CsvTable& table);
/// Plain-text summary with composition tables under their element names.
std::string render_text(const Report& report);

/// Deterministic serialization used for report.json.
std::string dump_report(const Json& document);

/// Catalog entries with parameters and defaults, in catalog order.
Json catalog_listing();
std::string render_catalog();

/// Resolves a dotted path ("a.b.0.c") inside a JSON value; null when absent.
const Json* json_path(const Json& root, const std::string& path);

/// Literal equality (numbers within 1e-9 relative) or a comparison object
/// {approx, tol} / {lt, le, gt, ge} / {contains}.
bool expectation_holds(const Json& actual, const Json& expected);

}  // namespace ellis
