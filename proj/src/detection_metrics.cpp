#include "raileval/detection_metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "raileval/parallel.hpp"

namespace raileval::det {

namespace {

constexpr const char* kClassNames[kNumClasses] = {
    "train", "signal", "signal_pole", "catenary_pole", "road_vehicle", "bicycle", "person",
};

struct FrameOutcome {
  std::vector<ap::ScoredUnit> units;
  std::int64_t counted_gt = 0;
};

FrameOutcome evaluate_frame(const DetectionFrame& frame, ObjectClass cls, double iou_threshold,
                            const DifficultyGate& gate) {
  FrameOutcome out;

  std::vector<std::size_t> counted;
  std::vector<std::size_t> neutral;
  for (std::size_t g = 0; g < frame.gts.size(); ++g) {
    const auto& gt = frame.gts[g];
    if (gt.cls != cls) continue;
    if (!gt.ignore && !gt.iscrowd && gate.admits(gt)) {
      counted.push_back(g);
    } else {
      neutral.push_back(g);
    }
  }
  out.counted_gt = static_cast<std::int64_t>(counted.size());

  std::vector<std::size_t> pred_order;
  for (std::size_t p = 0; p < frame.preds.size(); ++p) {
    if (frame.preds[p].cls == cls) pred_order.push_back(p);
  }
  std::stable_sort(pred_order.begin(), pred_order.end(), [&](std::size_t a, std::size_t b) {
    return frame.preds[a].score > frame.preds[b].score;
  });

  std::vector<bool> counted_taken(counted.size(), false);
  std::vector<bool> neutral_taken(neutral.size(), false);
  for (std::size_t p : pred_order) {
    const auto& pred = frame.preds[p];
    // Pass 1: counted ground truth, highest IoU wins.
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t j = 0; j < counted.size(); ++j) {
      if (counted_taken[j]) continue;
      const double iou = geom::box_iou(pred.box, frame.gts[counted[j]].box);
      if (iou > best_iou || (best < 0 && iou == best_iou)) {
        best_iou = iou;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      counted_taken[static_cast<std::size_t>(best)] = true;
      out.units.push_back({pred.score, true});
      continue;
    }
    // Pass 2: neutral ground truth absorbs the prediction. Crowd regions
    // are reusable; other neutral boxes match once.
    int neutral_best = -1;
    bool neutral_hit = false;
    double neutral_overlap = iou_threshold;
    for (std::size_t j = 0; j < neutral.size(); ++j) {
      const auto& gt = frame.gts[neutral[j]];
      if (!gt.iscrowd && neutral_taken[j]) continue;
      const double ov = gt.iscrowd ? geom::box_intersection_over_first(pred.box, gt.box)
                                   : geom::box_iou(pred.box, gt.box);
      if (ov > neutral_overlap || (!neutral_hit && ov == neutral_overlap)) {
        neutral_overlap = ov;
        neutral_best = static_cast<int>(j);
        neutral_hit = true;
      }
    }
    if (neutral_hit) {
      if (!frame.gts[neutral[static_cast<std::size_t>(neutral_best)]].iscrowd) {
        neutral_taken[static_cast<std::size_t>(neutral_best)] = true;
      }
      continue; // neither TP nor FP
    }
    out.units.push_back({pred.score, false});
  }
  return out;
}

} // namespace

const char* to_string(ObjectClass cls) { return kClassNames[static_cast<int>(cls)]; }

std::optional<ObjectClass> parse_object_class(const std::string& name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (name == kClassNames[i]) return static_cast<ObjectClass>(i);
  }
  return std::nullopt;
}

bool DifficultyGate::admits(const GtBox& gt) const {
  if (gt.box.area() < min_area) return false;
  return occlusion_inclusive ? gt.occlusion <= max_occlusion : gt.occlusion < max_occlusion;
}

DetectionConfig DetectionConfig::defaults() {
  DetectionConfig cfg;
  cfg.difficulties = {
      {"easy", 2500.0, 0.25, false},
      {"moderate", 625.0, 0.50, false},
      {"hard", 0.0, 0.99, true},
  };
  for (int i = 0; i <= 9; ++i) cfg.iou_thresholds.push_back((50 + 5 * i) / 100.0);
  return cfg;
}

void DetectionConfig::validate() const {
  if (difficulties.empty()) throw std::invalid_argument("difficulties must not be empty");
  for (const auto& d : difficulties) {
    if (d.min_area < 0.0) throw std::invalid_argument("difficulty min_area must be >= 0");
    if (d.max_occlusion < 0.0 || d.max_occlusion > 1.0) {
      throw std::invalid_argument("difficulty max_occlusion must be in [0,1]");
    }
  }
  if (iou_thresholds.empty()) throw std::invalid_argument("iou_thresholds must not be empty");
  for (double t : iou_thresholds) {
    if (t <= 0.0 || t > 1.0) throw std::invalid_argument("iou thresholds must be in (0,1]");
  }
}

ap::APResult evaluate_class(std::span<const DetectionFrame> frames, ObjectClass cls,
                            double iou_threshold, const DifficultyGate& gate, int threads) {
  std::vector<FrameOutcome> slots(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    slots[i] = evaluate_frame(frames[i], cls, iou_threshold, gate);
  });
  std::vector<ap::ScoredUnit> units;
  std::int64_t total_gt = 0;
  for (auto& slot : slots) {
    units.insert(units.end(), slot.units.begin(), slot.units.end());
    total_gt += slot.counted_gt;
  }
  auto result = ap::make_ap_result(std::move(units), total_gt, iou_threshold,
                                   std::string("AP/") + to_string(cls) + "/" + gate.name);
  return result;
}

DetectionSummary map_summary(std::span<const DetectionFrame> frames, const DetectionConfig& cfg,
                             int threads) {
  cfg.validate();
  DetectionSummary summary;

  for (const auto& gate : cfg.difficulties) {
    DetectionSummary::DifficultyRow row;
    row.name = gate.name;
    double class_sum = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
      const auto cls = static_cast<ObjectClass>(c);
      double threshold_sum = 0.0;
      std::int64_t counted = 0;
      for (double t : cfg.iou_thresholds) {
        const auto res = evaluate_class(frames, cls, t, gate, threads);
        threshold_sum += res.ap;
        if (!res.curve.empty()) counted = res.curve.front().tp + res.curve.front().fn;
      }
      if (counted > 0) {
        class_sum += threshold_sum / static_cast<double>(cfg.iou_thresholds.size());
        row.classes_counted += 1;
      }
    }
    row.map = row.classes_counted > 0 ? class_sum / row.classes_counted : 0.0;
    summary.maps.push_back(row);
  }

  const DifficultyGate& widest = cfg.difficulties.back();
  for (int c = 0; c < kNumClasses; ++c) {
    const auto res = evaluate_class(frames, static_cast<ObjectClass>(c), 0.50, widest, threads);
    const std::int64_t counted =
        res.curve.empty() ? 0 : res.curve.front().tp + res.curve.front().fn;
    if (counted > 0) summary.ap50_per_class[static_cast<std::size_t>(c)] = res.ap;
  }
  return summary;
}

} // namespace raileval::det
