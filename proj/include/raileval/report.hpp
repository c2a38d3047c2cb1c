// Batch evaluation entry points and deterministic report rendering.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "raileval/config.hpp"
#include "raileval/dataset_io.hpp"

namespace raileval::report {

struct MetricRow {
  std::string group; // metric family, e.g. "LineAP"
  std::string label; // operating point, e.g. "AP@0.5"
  std::optional<double> value; // absent rows render as "-"
};

struct EvalReport {
  io::Challenge challenge = io::Challenge::kRail;
  std::string tool_version;
  std::string report_schema_version;
  nlohmann::json config_echo;
  std::vector<MetricRow> rows;
  std::vector<io::Warning> warnings;
  std::vector<std::string> notes;
  std::string gt_digest;     // sha256 of the ground-truth document
  std::string pred_digest;   // sha256 of the prediction document
  std::string config_digest; // empty when no config file was given
};

/// Runs the full metric suite of one challenge over already-loaded sets.
std::vector<MetricRow> evaluate_rows(const io::EvalSet& gt, const io::PredictionSet& pred,
                                     const EvalConfig& cfg, int threads);

/// Loads, validates, evaluates and assembles the report. Throws
/// io::SchemaError for input violations; reports are never partial.
EvalReport run_eval(io::Challenge challenge, const std::string& gt_path,
                    const std::string& pred_path,
                    const std::optional<std::string>& config_path, int threads);

std::string render_table(const EvalReport& report);
nlohmann::json render_machine(const EvalReport& report);

std::string sha256_file(const std::string& path);

} // namespace raileval::report
