// Pixel-wise Jaccard index over {background, low, high vegetation}.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace raileval::seg {

inline constexpr int kNumLabels = 3; // background=0, low=1, high=2
inline constexpr std::uint8_t kDefaultIgnoreLabel = 255;

const char* label_name(int label);

/// Dense per-pixel class ids, row major.
struct LabelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
};

struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumLabels>, kNumLabels> counts{}; // [gt][pred]

  void merge(const ConfusionMatrix& other);
  std::int64_t total() const;
};

/// Adds per-pixel (gt, pred) pairs, skipping ground truth ignore pixels.
/// The prediction must not contain the ignore label.
void accumulate(const LabelMask& gt, const LabelMask& pred, ConfusionMatrix& acc,
                std::uint8_t ignore_label = kDefaultIgnoreLabel);

struct ClassIou {
  // Absent entries had no ground truth or predicted pixels at all.
  std::array<std::optional<double>, kNumLabels> per_class;
  // Mean over the two vegetation classes; background is scored but
  // excluded from the mean by convention.
  std::optional<double> mean_vegetation;
};

ClassIou class_iou(const ConfusionMatrix& acc);

} // namespace raileval::seg
