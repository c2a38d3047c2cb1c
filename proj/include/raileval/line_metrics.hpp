// Polyline detection metrics: LineAP, ChamferAP, TuSimple accuracy and
// CULane-style F1, all parameterized by thresholds relative to the image
// width of each frame.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "raileval/ap_core.hpp"
#include "raileval/geometry.hpp"

namespace raileval::lines {

struct LineEvalConfig {
  std::vector<double> rel_dist_thresholds{0.1, 0.5, 1.0}; // percent of image width
  double orientation_threshold_deg = 10.0;
  double rel_seg_len = 0.5; // percent of image width
  double residual_merge_ratio = 0.25;
  int chamfer_samples = 100;
  std::vector<double> chamfer_rel_thresholds{0.5, 1.0, 5.0};
  std::vector<double> tusimple_rel_thresholds{0.1, 0.2, 1.0};
  double tusimple_row_step_rel = 1.0; // percent of image height
  std::vector<double> culane_rel_widths{0.2, 0.5, 1.0};
  double culane_match_iou = 0.5;
  double score_group_epsilon = 1e-9;
  // When set, distance thresholds and segment length are absolute pixels
  // instead of percent-of-width.
  bool absolute_thresholds = false;

  void validate() const; // throws std::invalid_argument
};

struct LineEvalFrame {
  std::string frame_id;
  double image_width = 0.0;
  double image_height = 0.0;
  std::vector<geom::Polyline> gt_lines;
  std::vector<geom::Polyline> pred_lines; // carry confidence scores
  std::vector<geom::Polygon> ignore_regions;
};

/// One simultaneous matching step of LineAP: all predicted segments of a
/// confidence group resolved against the still-unmatched ground truth
/// segments of one frame.
struct MatchRound {
  std::size_t frame_index = 0;
  double group_score = 0.0;
  int group_size = 0;   // predicted segments in the group
  int matched = 0;      // true positives produced by this round
  double matched_cost = 0.0;
};

/// Segment-based average precision. Per frame: predictions are clipped
/// against ignore regions, all lines split into fixed-length segments,
/// and predicted segments are matched score-group by score-group against
/// unmatched ground truth segments via minimum-weight maximum matching
/// under joint distance + orientation gates. Pooled into one PR curve.
/// `rel_dist` is the distance threshold as percent of image width
/// (pixels when cfg.absolute_thresholds is set).
ap::APResult line_ap(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                     double rel_dist, int threads = 1,
                     std::vector<MatchRound>* trace = nullptr);

/// Symmetric Chamfer distance between two non-empty point sets.
double chamfer_distance(std::span<const geom::Point2> a, std::span<const geom::Point2> b);

/// Instance-level AP with Chamfer distance as the pairing gate and cost.
ap::APResult chamfer_ap(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                        double rel_thresh, int threads = 1);

struct TuSimpleDetail {
  std::int64_t matched_points = 0;
  std::int64_t total_points = 0;
  std::int64_t correct_lines = 0; // lines with >= 85% of points matched
  std::int64_t total_lines = 0;
};

/// Row-sampled point accuracy. Lines are compared at fixed vertical image
/// positions; each ground truth line is assigned the prediction matching
/// most of its sampled points. Horizontal lines that cross no sampling
/// row contribute no points (a known failure mode of this metric).
double tusimple_accuracy(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                         double rel_thresh, int threads = 1,
                         TuSimpleDetail* detail = nullptr);

/// Lines dilated to polygons of half width rel_width percent of image
/// width, instances matched at polygon IoU >= cfg.culane_match_iou,
/// scored as F1 over all predictions.
double culane_f1(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                 double rel_width, int threads = 1);

} // namespace raileval::lines
