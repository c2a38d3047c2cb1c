#include "raileval/config.hpp"

#include <fstream>
#include <stdexcept>

namespace raileval {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const char* scope,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("config: unknown key '") + scope + "." +
                                  item.key() + "'");
    }
  }
}

template <typename T>
void assign_if(const json& obj, const char* key, T& target) {
  if (const auto it = obj.find(key); it != obj.end()) target = it->get<T>();
}

} // namespace

void EvalConfig::validate() const {
  line.validate();
  detection.validate();
}

json config_to_json(const EvalConfig& cfg) {
  json diffs = json::array();
  for (const auto& d : cfg.detection.difficulties) {
    diffs.push_back({{"name", d.name},
                     {"min_area", d.min_area},
                     {"max_occlusion", d.max_occlusion},
                     {"occlusion_inclusive", d.occlusion_inclusive}});
  }
  return json{
      {"line",
       {{"rel_dist_thresholds", cfg.line.rel_dist_thresholds},
        {"orientation_threshold_deg", cfg.line.orientation_threshold_deg},
        {"rel_seg_len", cfg.line.rel_seg_len},
        {"residual_merge_ratio", cfg.line.residual_merge_ratio},
        {"chamfer_samples", cfg.line.chamfer_samples},
        {"chamfer_rel_thresholds", cfg.line.chamfer_rel_thresholds},
        {"tusimple_rel_thresholds", cfg.line.tusimple_rel_thresholds},
        {"tusimple_row_step_rel", cfg.line.tusimple_row_step_rel},
        {"culane_rel_widths", cfg.line.culane_rel_widths},
        {"culane_match_iou", cfg.line.culane_match_iou},
        {"score_group_epsilon", cfg.line.score_group_epsilon},
        {"absolute_thresholds", cfg.line.absolute_thresholds}}},
      {"detection", {{"difficulties", diffs}, {"iou_thresholds", cfg.detection.iou_thresholds}}},
      {"segmentation", {{"ignore_label", cfg.segmentation_ignore_label}}},
  };
}

EvalConfig config_from_json(const json& overrides) {
  EvalConfig cfg;
  if (!overrides.is_object()) throw std::invalid_argument("config: expected a JSON object");
  reject_unknown(overrides, "", {"line", "detection", "segmentation"});

  if (const auto it = overrides.find("line"); it != overrides.end()) {
    const json& l = *it;
    reject_unknown(l, "line",
                   {"rel_dist_thresholds", "orientation_threshold_deg", "rel_seg_len",
                    "residual_merge_ratio", "chamfer_samples", "chamfer_rel_thresholds",
                    "tusimple_rel_thresholds", "tusimple_row_step_rel", "culane_rel_widths",
                    "culane_match_iou", "score_group_epsilon", "absolute_thresholds"});
    assign_if(l, "rel_dist_thresholds", cfg.line.rel_dist_thresholds);
    assign_if(l, "orientation_threshold_deg", cfg.line.orientation_threshold_deg);
    assign_if(l, "rel_seg_len", cfg.line.rel_seg_len);
    assign_if(l, "residual_merge_ratio", cfg.line.residual_merge_ratio);
    assign_if(l, "chamfer_samples", cfg.line.chamfer_samples);
    assign_if(l, "chamfer_rel_thresholds", cfg.line.chamfer_rel_thresholds);
    assign_if(l, "tusimple_rel_thresholds", cfg.line.tusimple_rel_thresholds);
    assign_if(l, "tusimple_row_step_rel", cfg.line.tusimple_row_step_rel);
    assign_if(l, "culane_rel_widths", cfg.line.culane_rel_widths);
    assign_if(l, "culane_match_iou", cfg.line.culane_match_iou);
    assign_if(l, "score_group_epsilon", cfg.line.score_group_epsilon);
    assign_if(l, "absolute_thresholds", cfg.line.absolute_thresholds);
  }
  if (const auto it = overrides.find("detection"); it != overrides.end()) {
    const json& d = *it;
    reject_unknown(d, "detection", {"difficulties", "iou_thresholds"});
    if (const auto dit = d.find("difficulties"); dit != d.end()) {
      if (!dit->is_array()) throw std::invalid_argument("config: difficulties must be an array");
      cfg.detection.difficulties.clear();
      for (const auto& jd : *dit) {
        reject_unknown(jd, "detection.difficulties[]",
                       {"name", "min_area", "max_occlusion", "occlusion_inclusive"});
        det::DifficultyGate gate;
        gate.name = jd.at("name").get<std::string>();
        assign_if(jd, "min_area", gate.min_area);
        assign_if(jd, "max_occlusion", gate.max_occlusion);
        assign_if(jd, "occlusion_inclusive", gate.occlusion_inclusive);
        cfg.detection.difficulties.push_back(std::move(gate));
      }
    }
    assign_if(d, "iou_thresholds", cfg.detection.iou_thresholds);
  }
  if (const auto it = overrides.find("segmentation"); it != overrides.end()) {
    reject_unknown(*it, "segmentation", {"ignore_label"});
    int label = cfg.segmentation_ignore_label;
    assign_if(*it, "ignore_label", label);
    if (label < 0 || label > 255) {
      throw std::invalid_argument("config: ignore_label must be in [0,255]");
    }
    cfg.segmentation_ignore_label = static_cast<std::uint8_t>(label);
  }
  cfg.validate();
  return cfg;
}

EvalConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("config: malformed JSON in '" + path + "'");
  return config_from_json(doc);
}

} // namespace raileval
