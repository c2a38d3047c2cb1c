#include "raileval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "raileval/parallel.hpp"
#include "raileval/version.hpp"

namespace raileval::report {

using nlohmann::json;

namespace {

std::string format_threshold(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<lines::LineEvalFrame> to_line_frames(const io::EvalSet& gt,
                                                 const io::PredictionSet& pred) {
  std::vector<lines::LineEvalFrame> frames;
  frames.reserve(gt.frames.size());
  for (const auto& g : gt.frames) {
    lines::LineEvalFrame f;
    f.frame_id = g.frame_id;
    f.image_width = g.image_width;
    f.image_height = g.image_height;
    f.gt_lines = g.rails;
    f.ignore_regions = g.ignore_regions;
    if (const auto* p = pred.find(g.frame_id)) f.pred_lines = p->rails;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<det::DetectionFrame> to_detection_frames(const io::EvalSet& gt,
                                                     const io::PredictionSet& pred) {
  std::vector<det::DetectionFrame> frames;
  frames.reserve(gt.frames.size());
  for (const auto& g : gt.frames) {
    det::DetectionFrame f;
    f.frame_id = g.frame_id;
    f.gts = g.boxes;
    if (const auto* p = pred.find(g.frame_id)) f.preds = p->boxes;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<MetricRow> rail_rows(const io::EvalSet& gt, const io::PredictionSet& pred,
                                 const EvalConfig& cfg, int threads) {
  const auto frames = to_line_frames(gt, pred);
  std::vector<MetricRow> rows;
  for (double t : cfg.line.tusimple_rel_thresholds) {
    rows.push_back({"TuSimple", "Acc@" + format_threshold(t),
                    lines::tusimple_accuracy(frames, cfg.line, t, threads)});
  }
  for (double w : cfg.line.culane_rel_widths) {
    rows.push_back({"CULane F1", "F1@" + format_threshold(w),
                    lines::culane_f1(frames, cfg.line, w, threads)});
  }
  double chamfer_sum = 0.0;
  for (double t : cfg.line.chamfer_rel_thresholds) {
    const auto res = lines::chamfer_ap(frames, cfg.line, t, threads);
    chamfer_sum += res.ap;
    rows.push_back({"ChamferAP", "AP@" + format_threshold(t), res.ap});
  }
  rows.push_back({"ChamferAP", "AP_avg",
                  chamfer_sum / static_cast<double>(cfg.line.chamfer_rel_thresholds.size())});
  double line_sum = 0.0;
  for (double t : cfg.line.rel_dist_thresholds) {
    const auto res = lines::line_ap(frames, cfg.line, t, threads);
    line_sum += res.ap;
    rows.push_back({"LineAP", "AP@" + format_threshold(t), res.ap});
  }
  rows.push_back({"LineAP", "AP_avg",
                  line_sum / static_cast<double>(cfg.line.rel_dist_thresholds.size())});
  return rows;
}

std::vector<MetricRow> object_rows(const io::EvalSet& gt, const io::PredictionSet& pred,
                                   const EvalConfig& cfg, int threads) {
  const auto frames = to_detection_frames(gt, pred);
  const auto summary = det::map_summary(frames, cfg.detection, threads);
  std::vector<MetricRow> rows;
  for (const auto& d : summary.maps) {
    rows.push_back({"mAP@[.50:.95]", d.name, d.map});
  }
  for (int c = 0; c < det::kNumClasses; ++c) {
    rows.push_back({"AP@50", det::to_string(static_cast<det::ObjectClass>(c)),
                    summary.ap50_per_class[static_cast<std::size_t>(c)]});
  }
  return rows;
}

std::vector<MetricRow> vegetation_rows(const io::EvalSet& gt, const io::PredictionSet& pred,
                                       const EvalConfig& cfg, int threads) {
  std::vector<seg::ConfusionMatrix> slots(gt.frames.size());
  parallel_for(gt.frames.size(), threads, [&](std::size_t i) {
    const auto& g = gt.frames[i];
    const auto* p = pred.find(g.frame_id);
    seg::LabelMask pred_mask;
    if (p && p->has_mask) {
      pred_mask = p->mask;
    } else {
      // Missing prediction frames score as all-background.
      pred_mask.width = g.mask.width;
      pred_mask.height = g.mask.height;
      pred_mask.labels.assign(g.mask.labels.size(), 0);
    }
    seg::accumulate(g.mask, pred_mask, slots[i], cfg.segmentation_ignore_label);
  });
  seg::ConfusionMatrix acc;
  for (const auto& m : slots) acc.merge(m);

  const auto iou = seg::class_iou(acc);
  std::vector<MetricRow> rows;
  rows.push_back({"IoU", seg::label_name(1), iou.per_class[1]});
  rows.push_back({"IoU", seg::label_name(2), iou.per_class[2]});
  rows.push_back({"IoU", "mean_vegetation", iou.mean_vegetation});
  rows.push_back({"IoU", seg::label_name(0), iou.per_class[0]});
  return rows;
}

} // namespace

std::vector<MetricRow> evaluate_rows(const io::EvalSet& gt, const io::PredictionSet& pred,
                                     const EvalConfig& cfg, int threads) {
  cfg.validate();
  switch (gt.challenge) {
    case io::Challenge::kRail: return rail_rows(gt, pred, cfg, threads);
    case io::Challenge::kObject: return object_rows(gt, pred, cfg, threads);
    case io::Challenge::kVegetation: return vegetation_rows(gt, pred, cfg, threads);
  }
  return {};
}

EvalReport run_eval(io::Challenge challenge, const std::string& gt_path,
                    const std::string& pred_path,
                    const std::optional<std::string>& config_path, int threads) {
  EvalConfig cfg;
  if (config_path) cfg = load_config(*config_path);
  cfg.validate();

  auto gt = io::load_ground_truth(gt_path, challenge);
  auto pred = io::load_predictions(pred_path, gt.set);
  auto pairing = io::validate_pairing(gt.set, pred.set);

  EvalReport report;
  report.challenge = challenge;
  report.tool_version = kVersion;
  report.report_schema_version = kReportSchemaVersion;
  report.config_echo = config_to_json(cfg);
  report.rows = evaluate_rows(gt.set, pred.set, cfg, threads);
  report.warnings = std::move(gt.warnings);
  report.warnings.insert(report.warnings.end(), pred.warnings.begin(), pred.warnings.end());
  report.warnings.insert(report.warnings.end(), pairing.begin(), pairing.end());
  if (challenge == io::Challenge::kVegetation) {
    report.notes.push_back("mean_vegetation averages the two vegetation classes; "
                           "background is scored separately and excluded from the mean");
  }
  if (challenge == io::Challenge::kObject) {
    report.notes.push_back("the moderate difficulty gate is a tool default, "
                           "not part of the benchmark definition");
  }
  report.gt_digest = sha256_file(gt_path);
  report.pred_digest = sha256_file(pred_path);
  if (config_path) report.config_digest = sha256_file(*config_path);
  return report;
}

std::string render_table(const EvalReport& report) {
  std::ostringstream os;
  os << "raileval " << report.tool_version << " report\n";
  os << "challenge: " << io::to_string(report.challenge) << "\n";
  os << "inputs: gt sha256:" << report.gt_digest << "\n";
  os << "        pred sha256:" << report.pred_digest << "\n";
  if (!report.config_digest.empty()) {
    os << "        config sha256:" << report.config_digest << "\n";
  }
  os << "config: " << report.config_echo.dump() << "\n";
  os << "\n";

  std::size_t group_w = 6, label_w = 5;
  for (const auto& row : report.rows) {
    group_w = std::max(group_w, row.group.size());
    label_w = std::max(label_w, row.label.size());
  }
  os << "  " << std::string(group_w, '-') << "-+-" << std::string(label_w, '-') << "-+--------\n";
  for (const auto& row : report.rows) {
    char value[32];
    if (row.value) {
      std::snprintf(value, sizeof(value), "%7.1f", *row.value * 100.0);
    } else {
      std::snprintf(value, sizeof(value), "%7s", "-");
    }
    os << "  " << row.group << std::string(group_w - row.group.size(), ' ') << " | " << row.label
       << std::string(label_w - row.label.size(), ' ') << " | " << value << "\n";
  }
  os << "  " << std::string(group_w, '-') << "-+-" << std::string(label_w, '-') << "-+--------\n";
  os << "values are percentages\n";

  if (!report.notes.empty()) {
    os << "\nnotes:\n";
    for (const auto& note : report.notes) os << "  - " << note << "\n";
  }
  if (!report.warnings.empty()) {
    os << "\nwarnings (" << report.warnings.size() << "):\n";
    for (const auto& w : report.warnings) os << "  - " << w.format() << "\n";
  }
  return os.str();
}

json render_machine(const EvalReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json value;
    if (row.value) value = *row.value;
    rows.push_back({{"group", row.group}, {"label", row.label}, {"value", value}});
  }
  json warnings = json::array();
  for (const auto& w : report.warnings) {
    warnings.push_back({{"frame_id", w.frame_id}, {"field", w.field}, {"message", w.message}});
  }
  json inputs{{"gt_sha256", report.gt_digest}, {"pred_sha256", report.pred_digest}};
  if (!report.config_digest.empty()) inputs["config_sha256"] = report.config_digest;
  return json{{"report_schema_version", report.report_schema_version},
              {"tool_version", report.tool_version},
              {"challenge", io::to_string(report.challenge)},
              {"inputs", inputs},
              {"config", report.config_echo},
              {"metrics", rows},
              {"notes", report.notes},
              {"warnings", warnings}};
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::SchemaError(path, 0, "", "", "cannot open file for digest");

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    char byte[3];
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

} // namespace raileval::report
