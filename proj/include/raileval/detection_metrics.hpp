// COCO-style object detection mAP with occlusion/size difficulty gates
// and iscrowd / ignore neutrality semantics.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raileval/ap_core.hpp"
#include "raileval/geometry.hpp"

namespace raileval::det {

enum class ObjectClass : int {
  kTrain = 0,
  kSignal,
  kSignalPole,
  kCatenaryPole,
  kRoadVehicle,
  kBicycle,
  kPerson,
};
inline constexpr int kNumClasses = 7;

const char* to_string(ObjectClass cls);
std::optional<ObjectClass> parse_object_class(const std::string& name);

struct GtBox {
  ObjectClass cls = ObjectClass::kTrain;
  geom::Box box;
  double occlusion = 0.0;
  bool iscrowd = false;
  bool ignore = false;
};

struct PredBox {
  ObjectClass cls = ObjectClass::kTrain;
  geom::Box box;
  double score = 1.0;
};

struct DetectionFrame {
  std::string frame_id;
  std::vector<GtBox> gts;
  std::vector<PredBox> preds;
};

/// Ground-truth gate for one difficulty level. A box outside the gate is
/// neutral for that level: predictions on it are neither TP nor FP.
struct DifficultyGate {
  std::string name;
  double min_area = 0.0;       // px^2
  double max_occlusion = 1.0;  // fraction
  bool occlusion_inclusive = false;

  bool admits(const GtBox& gt) const;
};

struct DetectionConfig {
  std::vector<DifficultyGate> difficulties;
  std::vector<double> iou_thresholds;

  static DetectionConfig defaults();
  void validate() const;
};

/// AP for one class at one IoU threshold and difficulty. Counted ground
/// truth is gated, non-ignore, non-crowd; everything else of the class is
/// neutral. Predictions match counted GT greedily by descending score
/// preferring highest IoU; leftover predictions overlapping neutral GT
/// (crowd overlap measured as intersection over prediction area) are
/// dropped from scoring.
ap::APResult evaluate_class(std::span<const DetectionFrame> frames, ObjectClass cls,
                            double iou_threshold, const DifficultyGate& gate,
                            int threads = 1);

struct DetectionSummary {
  struct DifficultyRow {
    std::string name;
    double map = 0.0;
    int classes_counted = 0; // classes with >= 1 counted GT
  };
  std::vector<DifficultyRow> maps;
  // AP@0.50 at the last (most inclusive) difficulty; absent for classes
  // with zero counted ground truth.
  std::array<std::optional<double>, kNumClasses> ap50_per_class;
};

DetectionSummary map_summary(std::span<const DetectionFrame> frames,
                             const DetectionConfig& cfg, int threads = 1);

} // namespace raileval::det
