#include "raileval/segmentation_metrics.hpp"

#include <stdexcept>
#include <string>

namespace raileval::seg {

const char* label_name(int label) {
  switch (label) {
    case 0: return "background";
    case 1: return "low_vegetation";
    case 2: return "high_vegetation";
    default: return "invalid";
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (int i = 0; i < kNumLabels; ++i) {
    for (int j = 0; j < kNumLabels; ++j) counts[i][j] += other.counts[i][j];
  }
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts) {
    for (auto v : row) sum += v;
  }
  return sum;
}

void accumulate(const LabelMask& gt, const LabelMask& pred, ConfusionMatrix& acc,
                std::uint8_t ignore_label) {
  if (gt.width != pred.width || gt.height != pred.height) {
    throw std::invalid_argument("accumulate: mask dimensions differ (" +
                                std::to_string(gt.width) + "x" + std::to_string(gt.height) +
                                " vs " + std::to_string(pred.width) + "x" +
                                std::to_string(pred.height) + ")");
  }
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::uint8_t g = gt.labels[i];
    if (g == ignore_label) continue;
    const std::uint8_t p = pred.labels[i];
    if (g >= kNumLabels) throw std::invalid_argument("accumulate: invalid gt label");
    if (p >= kNumLabels) {
      throw std::invalid_argument(p == ignore_label
                                      ? "accumulate: prediction contains the ignore label"
                                      : "accumulate: invalid prediction label");
    }
    acc.counts[g][p] += 1;
  }
}

ClassIou class_iou(const ConfusionMatrix& acc) {
  ClassIou out;
  for (int c = 0; c < kNumLabels; ++c) {
    std::int64_t row = 0, col = 0;
    for (int j = 0; j < kNumLabels; ++j) {
      row += acc.counts[c][j];
      col += acc.counts[j][c];
    }
    const std::int64_t diag = acc.counts[c][c];
    const std::int64_t denom = row + col - diag;
    if (denom > 0) {
      out.per_class[c] = static_cast<double>(diag) / static_cast<double>(denom);
    }
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 1; c < kNumLabels; ++c) {
    if (out.per_class[c]) {
      sum += *out.per_class[c];
      ++present;
    }
  }
  if (present > 0) out.mean_vegetation = sum / present;
  return out;
}

} // namespace raileval::seg
