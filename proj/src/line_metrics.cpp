#include "raileval/line_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "raileval/parallel.hpp"

namespace raileval::lines {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double resolve_px(const LineEvalConfig& cfg, double rel_value, double image_width) {
  return cfg.absolute_thresholds ? rel_value : rel_value / 100.0 * image_width;
}

std::vector<geom::Polyline> clip_predictions(const LineEvalFrame& frame,
                                             std::size_t pred_index) {
  return geom::clip_polyline_outside(frame.pred_lines[pred_index], frame.ignore_regions);
}

struct SegmentBBox {
  double min_x, min_y, max_x, max_y;
};

SegmentBBox chain_bbox(const std::vector<geom::Point2>& chain) {
  SegmentBBox b{chain[0].x, chain[0].y, chain[0].x, chain[0].y};
  for (const auto& p : chain) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

struct LineApFrameOutcome {
  std::vector<ap::ScoredUnit> units;
  std::int64_t gt_segments = 0;
  std::vector<MatchRound> rounds;
};

LineApFrameOutcome line_ap_frame(const LineEvalFrame& frame, const LineEvalConfig& cfg,
                                 double dist_thresh, double seg_len) {
  LineApFrameOutcome out;

  std::vector<geom::LineSegmentUnit> gt_segs;
  for (std::size_t g = 0; g < frame.gt_lines.size(); ++g) {
    auto segs = geom::split_polyline(frame.gt_lines[g], seg_len, cfg.residual_merge_ratio);
    for (auto& s : segs) {
      s.parent_id = static_cast<int>(g);
      gt_segs.push_back(std::move(s));
    }
  }
  out.gt_segments = static_cast<std::int64_t>(gt_segs.size());

  std::vector<geom::LineSegmentUnit> pred_segs;
  for (std::size_t p = 0; p < frame.pred_lines.size(); ++p) {
    for (const auto& piece : clip_predictions(frame, p)) {
      auto segs = geom::split_polyline(piece, seg_len, cfg.residual_merge_ratio);
      for (auto& s : segs) {
        s.parent_id = static_cast<int>(p);
        pred_segs.push_back(std::move(s));
      }
    }
  }
  if (pred_segs.empty()) return out;

  // Descending score, stable in (parent line, segment position) order.
  std::stable_sort(pred_segs.begin(), pred_segs.end(),
                   [](const geom::LineSegmentUnit& a, const geom::LineSegmentUnit& b) {
                     return a.score > b.score;
                   });

  std::vector<SegmentBBox> pred_boxes;
  pred_boxes.reserve(pred_segs.size());
  for (const auto& s : pred_segs) pred_boxes.push_back(chain_bbox(s.chain));

  std::vector<bool> gt_taken(gt_segs.size(), false);
  out.units.resize(pred_segs.size());

  std::size_t group_begin = 0;
  while (group_begin < pred_segs.size()) {
    const double group_score = pred_segs[group_begin].score;
    std::size_t group_end = group_begin + 1;
    while (group_end < pred_segs.size() &&
           group_score - pred_segs[group_end].score <= cfg.score_group_epsilon) {
      ++group_end;
    }

    // Bipartite graph: this group's predicted segments vs unmatched GT.
    std::vector<int> free_gts;
    for (std::size_t g = 0; g < gt_segs.size(); ++g) {
      if (!gt_taken[g]) free_gts.push_back(static_cast<int>(g));
    }
    std::vector<ap::MatchCandidate> edges;
    for (std::size_t p = group_begin; p < group_end; ++p) {
      const auto& ps = pred_segs[p];
      const auto& bb = pred_boxes[p];
      for (std::size_t j = 0; j < free_gts.size(); ++j) {
        const auto& gs = gt_segs[static_cast<std::size_t>(free_gts[j])];
        if (gs.center.x < bb.min_x - dist_thresh || gs.center.x > bb.max_x + dist_thresh ||
            gs.center.y < bb.min_y - dist_thresh || gs.center.y > bb.max_y + dist_thresh) {
          continue;
        }
        if (geom::orientation_diff_deg(gs.orientation_deg, ps.orientation_deg) >
            cfg.orientation_threshold_deg) {
          continue;
        }
        const double d = geom::point_to_chain_distance(gs.center, ps.chain);
        if (d <= dist_thresh) {
          edges.push_back({static_cast<int>(p - group_begin), static_cast<int>(j), d});
        }
      }
    }
    const ap::MatchResult match = ap::min_weight_max_matching(
        static_cast<int>(group_end - group_begin), static_cast<int>(free_gts.size()),
        std::move(edges));

    for (const auto& [pl, gl] : match.pairs) {
      out.units[group_begin + static_cast<std::size_t>(pl)].is_tp = true;
      gt_taken[static_cast<std::size_t>(free_gts[static_cast<std::size_t>(gl)])] = true;
    }
    for (std::size_t p = group_begin; p < group_end; ++p) {
      out.units[p].score = pred_segs[p].score;
    }

    MatchRound round;
    round.group_score = group_score;
    round.group_size = static_cast<int>(group_end - group_begin);
    round.matched = static_cast<int>(match.pairs.size());
    round.matched_cost = match.total_cost;
    out.rounds.push_back(round);

    group_begin = group_end;
  }
  return out;
}

/// Samples one prediction instance after ignore-region clipping: each
/// surviving piece gets a share of the sample budget proportional to its
/// arc length. Returns an empty set when nothing survives.
std::vector<geom::Point2> sample_clipped_instance(const std::vector<geom::Polyline>& pieces,
                                                  int samples) {
  std::vector<geom::Point2> points;
  if (pieces.empty()) return points;
  double total = 0.0;
  for (const auto& piece : pieces) total += piece.arc_length();
  if (!(total > 0.0)) return points;
  for (const auto& piece : pieces) {
    const int n = std::max(2, static_cast<int>(std::lround(samples * piece.arc_length() / total)));
    auto pts = geom::resample_uniform(piece, n);
    points.insert(points.end(), pts.begin(), pts.end());
  }
  return points;
}

struct InstanceFrameOutcome {
  std::vector<ap::ScoredUnit> units;
  std::int64_t total_gt = 0;
};

InstanceFrameOutcome chamfer_frame(const LineEvalFrame& frame, const LineEvalConfig& cfg,
                                   double thresh) {
  InstanceFrameOutcome out;
  out.total_gt = static_cast<std::int64_t>(frame.gt_lines.size());

  std::vector<std::vector<geom::Point2>> gt_points;
  gt_points.reserve(frame.gt_lines.size());
  for (const auto& line : frame.gt_lines) {
    gt_points.push_back(geom::resample_uniform(line, cfg.chamfer_samples));
  }

  std::vector<ap::ScoredPred> preds;
  std::vector<std::vector<geom::Point2>> pred_points;
  for (std::size_t p = 0; p < frame.pred_lines.size(); ++p) {
    auto samples = sample_clipped_instance(clip_predictions(frame, p), cfg.chamfer_samples);
    if (samples.empty()) continue; // fully inside ignore regions
    preds.push_back({static_cast<int>(pred_points.size()),
                     frame.pred_lines[p].score.value_or(1.0)});
    pred_points.push_back(std::move(samples));
  }

  std::vector<ap::MatchCandidate> edges;
  for (std::size_t p = 0; p < pred_points.size(); ++p) {
    for (std::size_t g = 0; g < gt_points.size(); ++g) {
      const double cd = chamfer_distance(pred_points[p], gt_points[g]);
      if (cd <= thresh) edges.push_back({static_cast<int>(p), static_cast<int>(g), cd});
    }
  }
  const auto matches = ap::greedy_match(preds, edges);

  out.units.resize(preds.size());
  for (std::size_t p = 0; p < preds.size(); ++p) out.units[p].score = preds[p].score;
  for (const auto& [pid, gid] : matches) {
    (void)gid;
    out.units[static_cast<std::size_t>(pid)].is_tp = true;
  }
  return out;
}

std::vector<ap::ScoredUnit> pool_units(std::vector<InstanceFrameOutcome>& slots,
                                       std::int64_t& total_gt) {
  std::vector<ap::ScoredUnit> units;
  total_gt = 0;
  for (auto& slot : slots) {
    units.insert(units.end(), slot.units.begin(), slot.units.end());
    total_gt += slot.total_gt;
  }
  return units;
}

// Crossings of a polyline with the horizontal line y = row, ascending x.
// Chords are treated half-open in y so shared vertices count once;
// horizontal chords produce no crossing.
void row_crossings(const std::vector<geom::Point2>& pts, double row, std::vector<double>& out) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    if ((a.y > row) == (b.y > row)) continue;
    const double t = (row - a.y) / (b.y - a.y);
    out.push_back(a.x + t * (b.x - a.x));
  }
}

struct TuSimpleFrameOutcome {
  std::int64_t matched = 0;
  std::int64_t total = 0;
  std::int64_t correct_lines = 0;
  std::int64_t total_lines = 0;
};

TuSimpleFrameOutcome tusimple_frame(const LineEvalFrame& frame, const LineEvalConfig& cfg,
                                    double thresh) {
  TuSimpleFrameOutcome out;
  const double step = cfg.absolute_thresholds
                          ? cfg.tusimple_row_step_rel
                          : cfg.tusimple_row_step_rel / 100.0 * frame.image_height;

  struct SampledLine {
    std::map<int, std::vector<double>> xs_by_row;
    std::int64_t point_count = 0;
  };
  auto sample = [&](const std::vector<std::vector<geom::Point2>>& pieces) {
    SampledLine s;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    for (const auto& pts : pieces) {
      for (const auto& p : pts) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
      }
    }
    if (!(ymin <= ymax)) return s;
    const int k_lo = std::max(0, static_cast<int>(std::ceil((ymin - 1e-9) / step)));
    const int k_hi = static_cast<int>(std::floor((ymax + 1e-9) / step));
    std::vector<double> xs;
    for (int k = k_lo; k <= k_hi; ++k) {
      xs.clear();
      for (const auto& pts : pieces) row_crossings(pts, k * step, xs);
      if (xs.empty()) continue;
      std::sort(xs.begin(), xs.end());
      s.point_count += static_cast<std::int64_t>(xs.size());
      s.xs_by_row.emplace(k, xs);
    }
    return s;
  };

  std::vector<SampledLine> gts;
  for (const auto& line : frame.gt_lines) {
    gts.push_back(sample({geom::dedup_points(line.points)}));
  }
  std::vector<SampledLine> preds;
  for (std::size_t p = 0; p < frame.pred_lines.size(); ++p) {
    std::vector<std::vector<geom::Point2>> pieces;
    for (const auto& piece : clip_predictions(frame, p)) pieces.push_back(piece.points);
    if (pieces.empty()) continue;
    preds.push_back(sample(pieces));
  }

  // Matched-point counts per (gt, pred) pair; nearest crossing wins.
  std::vector<std::vector<std::int64_t>> counts(gts.size(),
                                                std::vector<std::int64_t>(preds.size(), 0));
  for (std::size_t g = 0; g < gts.size(); ++g) {
    out.total += gts[g].point_count;
    out.total_lines += 1;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      std::int64_t c = 0;
      for (const auto& [row, gxs] : gts[g].xs_by_row) {
        const auto it = preds[p].xs_by_row.find(row);
        if (it == preds[p].xs_by_row.end()) continue;
        const auto& pxs = it->second;
        for (double gx : gxs) {
          const auto lb = std::lower_bound(pxs.begin(), pxs.end(), gx);
          double best = std::numeric_limits<double>::infinity();
          if (lb != pxs.end()) best = std::min(best, std::abs(*lb - gx));
          if (lb != pxs.begin()) best = std::min(best, std::abs(*(lb - 1) - gx));
          if (best <= thresh) ++c;
        }
      }
      counts[g][p] = c;
    }
  }

  // Greedy assignment by matched-point count; each prediction used once.
  std::vector<bool> gt_done(gts.size(), false);
  std::vector<bool> pred_done(preds.size(), false);
  while (true) {
    std::int64_t best = 0;
    std::size_t bg = 0, bp = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_done[g]) continue;
      for (std::size_t p = 0; p < preds.size(); ++p) {
        if (pred_done[p]) continue;
        if (counts[g][p] > best) {
          best = counts[g][p];
          bg = g;
          bp = p;
        }
      }
    }
    if (best == 0) break;
    gt_done[bg] = true;
    pred_done[bp] = true;
    out.matched += best;
    if (gts[bg].point_count > 0 &&
        static_cast<double>(best) >= 0.85 * static_cast<double>(gts[bg].point_count)) {
      out.correct_lines += 1;
    }
  }
  return out;
}

InstanceFrameOutcome culane_frame(const LineEvalFrame& frame, const LineEvalConfig& cfg,
                                  double half_width) {
  InstanceFrameOutcome out;
  out.total_gt = static_cast<std::int64_t>(frame.gt_lines.size());

  std::vector<std::vector<geom::Polygon>> gt_polys;
  for (const auto& line : frame.gt_lines) {
    gt_polys.push_back({geom::buffer_polyline(line, half_width)});
  }

  std::vector<ap::ScoredPred> preds;
  std::vector<std::vector<geom::Polygon>> pred_polys;
  for (std::size_t p = 0; p < frame.pred_lines.size(); ++p) {
    std::vector<geom::Polygon> polys;
    for (const auto& piece : clip_predictions(frame, p)) {
      polys.push_back(geom::buffer_polyline(piece, half_width));
    }
    if (polys.empty()) continue;
    preds.push_back({static_cast<int>(pred_polys.size()),
                     frame.pred_lines[p].score.value_or(1.0)});
    pred_polys.push_back(std::move(polys));
  }

  std::vector<ap::MatchCandidate> edges;
  for (std::size_t p = 0; p < pred_polys.size(); ++p) {
    for (std::size_t g = 0; g < gt_polys.size(); ++g) {
      const double iou = geom::multi_polygon_iou(pred_polys[p], gt_polys[g]);
      if (iou >= cfg.culane_match_iou) {
        edges.push_back({static_cast<int>(p), static_cast<int>(g), 1.0 - iou});
      }
    }
  }
  const auto matches = ap::greedy_match(preds, edges);

  out.units.resize(preds.size());
  for (std::size_t p = 0; p < preds.size(); ++p) out.units[p].score = preds[p].score;
  for (const auto& [pid, gid] : matches) {
    (void)gid;
    out.units[static_cast<std::size_t>(pid)].is_tp = true;
  }
  return out;
}

} // namespace

void LineEvalConfig::validate() const {
  require(!rel_dist_thresholds.empty(), "rel_dist_thresholds must not be empty");
  for (double v : rel_dist_thresholds) require(v > 0.0, "distance thresholds must be > 0");
  require(orientation_threshold_deg > 0.0 && orientation_threshold_deg <= 90.0,
          "orientation_threshold_deg must be in (0,90]");
  require(rel_seg_len > 0.0, "rel_seg_len must be > 0");
  require(residual_merge_ratio >= 0.0 && residual_merge_ratio < 1.0,
          "residual_merge_ratio must be in [0,1)");
  require(chamfer_samples >= 2, "chamfer_samples must be >= 2");
  for (double v : chamfer_rel_thresholds) require(v > 0.0, "chamfer thresholds must be > 0");
  for (double v : tusimple_rel_thresholds) require(v > 0.0, "tusimple thresholds must be > 0");
  require(tusimple_row_step_rel > 0.0, "tusimple_row_step_rel must be > 0");
  for (double v : culane_rel_widths) require(v > 0.0, "culane widths must be > 0");
  require(culane_match_iou > 0.0 && culane_match_iou <= 1.0,
          "culane_match_iou must be in (0,1]");
  require(score_group_epsilon >= 0.0, "score_group_epsilon must be >= 0");
}

ap::APResult line_ap(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                     double rel_dist, int threads, std::vector<MatchRound>* trace) {
  cfg.validate();
  std::vector<LineApFrameOutcome> slots(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    const double dist_thresh = resolve_px(cfg, rel_dist, frames[i].image_width);
    const double seg_len = resolve_px(cfg, cfg.rel_seg_len, frames[i].image_width);
    slots[i] = line_ap_frame(frames[i], cfg, dist_thresh, seg_len);
  });

  std::vector<ap::ScoredUnit> units;
  std::int64_t total_gt = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    units.insert(units.end(), slots[i].units.begin(), slots[i].units.end());
    total_gt += slots[i].gt_segments;
    if (trace) {
      for (auto round : slots[i].rounds) {
        round.frame_index = i;
        trace->push_back(round);
      }
    }
  }
  return ap::make_ap_result(std::move(units), total_gt, rel_dist, "LineAP");
}

double chamfer_distance(std::span<const geom::Point2> a, std::span<const geom::Point2> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chamfer_distance: empty point set");
  auto directed = [](std::span<const geom::Point2> from, std::span<const geom::Point2> to) {
    double sum = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, geom::distance(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (directed(a, b) + directed(b, a));
}

ap::APResult chamfer_ap(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                        double rel_thresh, int threads) {
  cfg.validate();
  std::vector<InstanceFrameOutcome> slots(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    slots[i] = chamfer_frame(frames[i], cfg, resolve_px(cfg, rel_thresh, frames[i].image_width));
  });
  std::int64_t total_gt = 0;
  auto units = pool_units(slots, total_gt);
  return ap::make_ap_result(std::move(units), total_gt, rel_thresh, "ChamferAP");
}

double tusimple_accuracy(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                         double rel_thresh, int threads, TuSimpleDetail* detail) {
  cfg.validate();
  std::vector<TuSimpleFrameOutcome> slots(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    slots[i] = tusimple_frame(frames[i], cfg, resolve_px(cfg, rel_thresh, frames[i].image_width));
  });
  TuSimpleFrameOutcome total;
  for (const auto& s : slots) {
    total.matched += s.matched;
    total.total += s.total;
    total.correct_lines += s.correct_lines;
    total.total_lines += s.total_lines;
  }
  if (detail) {
    detail->matched_points = total.matched;
    detail->total_points = total.total;
    detail->correct_lines = total.correct_lines;
    detail->total_lines = total.total_lines;
  }
  if (total.total == 0) return 1.0;
  return static_cast<double>(total.matched) / static_cast<double>(total.total);
}

double culane_f1(std::span<const LineEvalFrame> frames, const LineEvalConfig& cfg,
                 double rel_width, int threads) {
  cfg.validate();
  std::vector<InstanceFrameOutcome> slots(frames.size());
  parallel_for(frames.size(), threads, [&](std::size_t i) {
    slots[i] = culane_frame(frames[i], cfg, resolve_px(cfg, rel_width, frames[i].image_width));
  });
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const auto& s : slots) {
    std::int64_t frame_tp = 0;
    for (const auto& u : s.units) frame_tp += u.is_tp ? 1 : 0;
    tp += frame_tp;
    fp += static_cast<std::int64_t>(s.units.size()) - frame_tp;
    fn += s.total_gt - frame_tp;
  }
  const std::int64_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

} // namespace raileval::lines
