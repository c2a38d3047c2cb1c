#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "raileval/detection_metrics.hpp"
#include "raileval/line_metrics.hpp"
#include "raileval/segmentation_metrics.hpp"

namespace raileval {

/// Every tunable that can affect a reported number. The JSON form of
/// this struct is echoed verbatim into each report.
struct EvalConfig {
  lines::LineEvalConfig line;
  det::DetectionConfig detection = det::DetectionConfig::defaults();
  std::uint8_t segmentation_ignore_label = seg::kDefaultIgnoreLabel;

  void validate() const;
};

nlohmann::json config_to_json(const EvalConfig& cfg);

/// Applies a partial override document on top of the defaults. Unknown
/// keys are rejected. Throws std::invalid_argument on violations.
EvalConfig config_from_json(const nlohmann::json& overrides);

EvalConfig load_config(const std::string& path);

} // namespace raileval
